from pathlib import Path

import pytest

from lodlangcov import langtags

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def wals_index() -> langtags.WalsIndex:
    return langtags.load_wals(
        DATA / "wals_languoids.csv",
        written_filter=True,
        written_list_path=DATA / "written_codes.txt",
    )


@pytest.fixture
def iso_bridge() -> dict:
    return langtags.load_iso_bridge(DATA / "iso1_to_iso3.csv")
