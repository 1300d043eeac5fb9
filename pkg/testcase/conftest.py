import os

import pytest


def pytest_collection_modifyitems(config, items):
    # stress 測試只在 STRESS_TEST=1 時執行
    if os.environ.get("STRESS_TEST") == "1":
        return
    skip_stress = pytest.mark.skip(reason="stress test; set STRESS_TEST=1 or use 'selftest --stress'")
    for item in items:
        if "stress" in item.keywords:
            item.add_marker(skip_stress)
