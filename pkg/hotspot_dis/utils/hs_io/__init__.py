from hotspot_dis.utils.hs_io.csv_io import read_hotspot_csv, write_hotspot_csv, HotspotFormatError
from hotspot_dis.utils.hs_io.geojson_io import read_burned_areas, write_burned_areas, \
    BurnedAreaFormatError
from hotspot_dis.utils.hs_io.patch_io import read_patch_store, write_patch_store, PatchStoreError
from hotspot_dis.utils.hs_io.main import read_scene, write_scene, SCENE_FILES
