"""
เขียนผลลัพธ์เป็น CSV

บรรทัดแรกของทุกไฟล์: '# fnn_lab experiment=<ชื่อ> seed=<seed> config=<RunConfig เป็น sorted JSON>'
float เขียนด้วย repr (ค่า double ย้อนกลับได้ตรงทุกบิต) ไฟล์จึงเหมือนกันทุกไบต์เมื่อรันซ้ำ
"""

import csv
import io
import logging
import math
from pathlib import Path

logger = logging.getLogger(__name__)


def format_cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        return repr(float(value))
    if hasattr(value, 'item'):
        # numpy scalar
        return format_cell(value.item())
    return str(value)


def provenance_line(config):
    return f"# fnn_lab experiment={config.experiment} seed={config.seed} config={config.to_json()}"


def render_csv(config, header, rows):
    buffer = io.StringIO()
    buffer.write(provenance_line(config) + '\n')
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
    return buffer.getvalue()


def write_csv(config, name, header, rows):
    """เขียน <out_dir>/<name> แล้วคืน path"""
    directory = Path(config.out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / name
    path.write_text(render_csv(config, header, rows), encoding='utf-8')
    logger.info("wrote %s", path)
    return path


def read_csv(path):
    """อ่านไฟล์ที่ write_csv เขียน: คืน (provenance line, header, rows เป็น string)"""
    lines = Path(path).read_text(encoding='utf-8').splitlines()
    reader = csv.reader(lines[1:])
    header = next(reader)
    return lines[0], header, list(reader)
