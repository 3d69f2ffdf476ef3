__version__ = '0.1.1'

from hotspot_dis.core import geo
from hotspot_dis.core import records
