#!/usr/bin/env python3
"""
Setup checks: configuration, data files and a short run of the property suite.
Runs under pytest or directly with `python tests/test_setup.py`.
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

from app.config import Settings
from app.utils.errors import ConfigurationError, DomainError
from app.utils.invariants import InvariantSuite

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def test_settings_from_env(monkeypatch):
    """Environment variables override the defaults."""
    monkeypatch.setenv('HRR_DEFAULT_AMBIENT', '3')
    monkeypatch.setenv('HRR_WORKERS', '4')
    monkeypatch.setenv('HRR_LOG_LEVEL', 'debug')
    settings = Settings.from_env()
    assert settings.default_ambient == 3
    assert settings.workers == 4
    assert settings.log_level == 'DEBUG'


@pytest.mark.parametrize("name, value", [
    ('HRR_DEFAULT_AMBIENT', 'two'),
    ('HRR_DEFAULT_AMBIENT', '0'),
    ('HRR_MAX_AMBIENT', '0'),
    ('HRR_WORKERS', '0'),
    ('HRR_CHECK_CASES', '0'),
    ('HRR_LOG_LEVEL', 'LOUD'),
])
def test_bad_settings_are_rejected(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigurationError):
        Settings.from_env()


def test_ambient_limit():
    settings = Settings(max_ambient=5)
    assert settings.check_ambient(5) == 5
    with pytest.raises(DomainError):
        settings.check_ambient(6)
    with pytest.raises(DomainError):
        settings.check_ambient(0)


def test_data_files():
    """The bundled example workspace is present."""
    assert os.path.exists(os.path.join(ROOT, 'data', 'workspaces', 'example.json'))


def test_property_suite_smoke():
    """Every property group passes on a few cases."""
    results = InvariantSuite(cases=2, seed=1).run()
    assert [g['name'] for g in results['groups']] == [
        'exact-core', 'symroots', 'bundle-calculus', 'k-theory', 'riemann-roch', 'koszul', 'expression',
    ]
    assert results['passed'] > 0 and results['failed'] == 0


def test_property_suite_is_seeded():
    first = InvariantSuite(cases=3, seed=5).run(['expression', 'exact-core'])
    second = InvariantSuite(cases=3, seed=5, workers=2).run(['expression', 'exact-core'])
    assert [g['checks'] for g in first['groups']] == [g['checks'] for g in second['groups']]


def main():
    """Run the setup checks without pytest."""
    print("🧪 Running setup checks\n")
    checks = [
        ("Data Files", test_data_files),
        ("Ambient Limit", test_ambient_limit),
        ("Property Suite", test_property_suite_smoke),
    ]
    all_passed = True
    for name, check in checks:
        try:
            check()
            print(f"✅ PASS {name}")
        except Exception as e:
            print(f"❌ FAIL {name}: {e}")
            all_passed = False
    return all_passed


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
