# Configuration file for the Sphinx documentation builder.
#
# This file only contains a selection of the most common options. For a full
# list see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Project information -----------------------------------------------------
import datetime
date = datetime.date.today()

project = 'hotspot_dis'
copyright = f'{date.year}, hotspot_dis developers'
author = 'hotspot_dis developers'

# The full version, including alpha/beta/rc tags
version = '0.1.1'
release = version

rst_epilog = """
.. |cli| replace:: ``hotspot_dis``
"""

# -- General configuration ---------------------------------------------------

extensions = [
]

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
