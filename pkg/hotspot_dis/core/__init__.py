from hotspot_dis.core.geo import GeoPoint, PolygonGeom, TimeInterval, STIndex
from hotspot_dis.core.records import Sensor, HotspotRecord, BurnedAreaRecord, RasterPatch
