"""Secondary Ext over the Steenrod algebra: d2 and E3 of the mod 2 Adams spectral sequence."""

from pathlib import Path

DATA = Path(__file__).resolve().parent / "data"


def data_file(name: str) -> Path:
    return DATA / name
