#!/usr/bin/env python

from setuptools import setup

with open('requirements.txt', 'rt') as f:
    install_requires = [l.strip() for l in f.readlines() if l.strip()]

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(name='hotspot_dis',
      version='0.1.1',
      description='Wildfire versus non-wildfire disambiguation of satellite thermal hotspots',
      long_description=long_description,
      long_description_content_type="text/markdown",
      packages=['hotspot_dis',
                'hotspot_dis.core',
                'hotspot_dis.utils',
                'hotspot_dis.utils.hs_io',
                'hotspot_dis.utils.synthetic',
                'hotspot_dis.utils.classifiers',
                'hotspot_dis.utils.patchnet',
                'hotspot_dis.scripts'
                ],
      package_data={'hotspot_dis.utils': ['templates/*.html']},
      install_requires=install_requires,
      extras_require={'test': ['pytest', 'hypothesis']},
      entry_points={'console_scripts': [
          'hotspot_dis=hotspot_dis.scripts.hotspot_dis:main']}
      )
