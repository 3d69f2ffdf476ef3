#!/usr/bin/env python

# patch_io.py - Binary raster patch store
#
# Layout (little-endian):
#   magic 'HSPT' | version u16 | count u32
#   per patch: id u64 | H u16 | W u16 | C u16 | H*W*C float32 as [c][row][col]
#
# Patch quality flags are kept in a JSON sidecar (<store>.json).

import os
import re
import struct

import numpy as np

from hotspot_dis.core.records import RasterPatch
from hotspot_dis.utils.constants import PATCH_STORE_MAGIC, PATCH_STORE_VERSION, \
    PATCH_SIZE, PATCH_CHANNELS
from hotspot_dis.utils.hs_io.geojson_io import readJSON, writeJSON

_HEADER = struct.Struct('<4sHI')
_PATCH_HEADER = struct.Struct('<QHHH')


class PatchStoreError(ValueError):
    pass


def sidecar_name(filename):
    return re.sub(r'(\.hspt)?$', '.json', str(filename), count=1)


def write_patch_store(filename, patches, validate=True):
    """
    Write patches to a binary store.

    Parameters
    ----------
    filename : str
    patches : sequence of RasterPatch
    validate : bool
        Check every patch (shape, NaN, land cover codes) before writing.
    """
    if validate:
        for p in patches:
            p.validate()
    with open(filename, 'wb') as f:
        f.write(_HEADER.pack(PATCH_STORE_MAGIC, PATCH_STORE_VERSION, len(patches)))
        for p in patches:
            H, W, C = p.values.shape
            f.write(_PATCH_HEADER.pack(p.hotspot_id, H, W, C))
            data = np.ascontiguousarray(np.transpose(p.values, (2, 0, 1)), dtype='<f4')
            f.write(data.tobytes())

    writeJSON(sidecar_name(filename),
              {'count': len(patches),
               'gap_filled': [p.hotspot_id for p in patches if p.gap_filled]})


def read_patch_store(filename, validate=True):
    """
    Read a binary patch store.

    Parameters
    ----------
    filename : str
    validate : bool
        Reject patches whose shape is not 32x32x33.

    Returns
    -------
    list of RasterPatch
    """
    with open(filename, 'rb') as f:
        buf = f.read()

    if len(buf) < 4 or buf[:4] != PATCH_STORE_MAGIC:
        raise PatchStoreError(f'{filename} is not a patch store (bad magic).')
    if len(buf) < _HEADER.size:
        raise PatchStoreError(f'{filename} is truncated (incomplete header).')
    _, version, count = _HEADER.unpack_from(buf, 0)
    if version != PATCH_STORE_VERSION:
        raise PatchStoreError(f'{filename}: unsupported patch store version {version}.')

    flagged = set()
    sidecar = sidecar_name(filename)
    if os.path.isfile(sidecar):
        flagged = set(readJSON(sidecar).get('gap_filled', []))

    patches = []
    offset = _HEADER.size
    for k in range(count):
        if offset + _PATCH_HEADER.size > len(buf):
            raise PatchStoreError(f'{filename} is truncated at patch {k}.')
        pid, H, W, C = _PATCH_HEADER.unpack_from(buf, offset)
        offset += _PATCH_HEADER.size
        if validate and (H, W, C) != (PATCH_SIZE, PATCH_SIZE, PATCH_CHANNELS):
            raise PatchStoreError(f'Patch {pid} has shape {(H, W, C)}, expected '
                                  f'{(PATCH_SIZE, PATCH_SIZE, PATCH_CHANNELS)}.')
        n = H * W * C
        if offset + 4 * n > len(buf):
            raise PatchStoreError(f'{filename} is truncated at patch {k}.')
        data = np.frombuffer(buf, dtype='<f4', count=n, offset=offset)
        offset += 4 * n
        values = np.transpose(data.reshape(C, H, W), (1, 2, 0)).astype(np.float32)
        patches.append(RasterPatch(pid, values, gap_filled=pid in flagged))

    if offset != len(buf):
        raise PatchStoreError(f'{filename} has {len(buf) - offset} unexpected trailing bytes.')
    return patches
