"""
Tensor container ที่ใช้ร่วมกันระหว่าง feedforward network กับ SCRN

รูปแบบ: ไฟล์ .npz (ไม่ใช้ pickle)
  - entry แรก '__header__' = JSON string: architecture tag, มิติ (d, n, C ...)
    และ 'tensors' = รายชื่อ tensor ตามลำดับที่เขียน
  - ตามด้วย tensor float64 ทีละตัวตามลำดับใน header
ค่า double เก็บแบบ raw จึงอ่านกลับได้ตรงทุกบิต
"""

import io
import json

import numpy as np

from .errors import DatasetError

HEADER_KEY = '__header__'
FORMAT_VERSION = 1


def dump_tensors(architecture, dims, tensors):
    """
    Function: dump_tensors
    หน้าที่: รวม header + tensors (ตามลำดับ dict) เป็น bytes
    """
    header = {
        'format': FORMAT_VERSION,
        'architecture': architecture,
        'dims': dims,
        'tensors': list(tensors),
    }
    buffer = io.BytesIO()
    arrays = {HEADER_KEY: np.array(json.dumps(header, sort_keys=True))}
    for name, value in tensors.items():
        arrays[name] = np.asarray(value, dtype=np.float64)
    np.savez(buffer, **arrays)
    return buffer.getvalue()


def load_tensors(blob):
    """อ่าน bytes กลับเป็น (header, tensors) โดยเรียง tensor ตาม header"""
    try:
        with np.load(io.BytesIO(bytes(blob)), allow_pickle=False) as archive:
            header = json.loads(str(archive[HEADER_KEY]))
            tensors = {name: np.array(archive[name], dtype=np.float64) for name in header['tensors']}
    except (KeyError, ValueError, OSError) as exc:
        raise DatasetError(f"not a valid fnn_lab tensor container: {exc}") from exc
    if header.get('format') != FORMAT_VERSION:
        raise DatasetError(f"unsupported container format {header.get('format')}")
    return header, tensors
