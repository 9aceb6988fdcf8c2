"""
Exception hierarchy ของ fnn_lab

ทุก exception มี exit_code ติดตัว เพื่อให้ management command แปลงเป็น
CommandError(returncode=...) ได้ตรงตามรหัส:
0 สำเร็จ, 1 ใช้งานผิด (usage), 2 ข้อมูลผิด, 3 ตรวจสอบไม่ผ่าน, 4 ตัวเลขพัง (numerical abort)
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFICATION = 3
EXIT_NUMERICAL = 4


class FnnLabError(Exception):
    exit_code = EXIT_DATA


class ConfigError(FnnLabError):
    """ค่า config ไม่ครบหรือผิดรูปแบบ"""
    exit_code = EXIT_USAGE


# --- ข้อผิดพลาดของ numerical library (สัญญาของฟังก์ชัน) ---

class DimensionError(FnnLabError, ValueError):
    """ขนาด array ไม่ตรงกัน"""


class DomainError(FnnLabError, ValueError):
    """ค่าอยู่นอกโดเมนที่ฟังก์ชันรับได้ (เช่น input ว่าง, ค่าติดลบใน log)"""


class DegenerateFitError(DomainError):
    pass


class DegenerateTableError(DomainError):
    pass


class ResourceLimitError(FnnLabError):
    """Lattice ใหญ่เกินงบ memory; เก็บจำนวนจุดที่คำนวณได้ไว้ใน count_bound"""

    def __init__(self, message, count_bound):
        super().__init__(message)
        self.count_bound = count_bound


# --- ข้อมูล (dataset) ---

class DatasetError(FnnLabError):
    exit_code = EXIT_DATA


class IdxFormatError(DatasetError):
    pass


class TruncatedFileError(DatasetError):
    pass


class CountMismatchError(DatasetError):
    pass


class SplitError(DatasetError, ValueError):
    pass


class CorpusError(DatasetError):
    pass


class MissingDataError(DatasetError):
    pass


# --- การตรวจสอบผลและการคำนวณ ---

class VerificationFailure(FnnLabError):
    exit_code = EXIT_VERIFICATION


class NumericalAbort(FnnLabError):
    """Loss หรือ gradient ไม่ finite; diagnostics บอกตำแหน่งที่พัง"""
    exit_code = EXIT_NUMERICAL

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class NumericalConsistencyError(NumericalAbort):
    pass
