#!/usr/bin/env python3
"""Repository reusability lint: licensing, documentation, CI, compatibility.

Exit status 0 iff every check passes; one line per check on stdout.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

README_REQUIRED_SECTIONS = ("install", "test", "api", "configuration")


def check_license() -> list:
    problems = []
    path = ROOT / "LICENSE"
    if not path.exists():
        return ["LICENSE file is missing"]
    text = path.read_text("utf-8")
    if "Permission is hereby granted" not in text or "MIT" not in text:
        problems.append("LICENSE is not an MIT license text")
    return problems


def check_docs() -> list:
    problems = []
    readme = ROOT / "README.md"
    if not readme.exists():
        return ["README.md is missing"]
    text = readme.read_text("utf-8").lower()
    for section in README_REQUIRED_SECTIONS:
        if section not in text:
            problems.append("README.md does not cover %r" % section)
    package = ROOT / "src" / "metalake"
    for module in sorted(package.rglob("*.py")):
        first = module.read_text("utf-8").lstrip()
        if module.name != "__init__.py" and not first.startswith(('"""', "'''")):
            problems.append("module %s lacks a docstring" % module.relative_to(ROOT))
    return problems


def check_ci() -> list:
    workflows = ROOT / ".github" / "workflows"
    if not workflows.is_dir() or not any(workflows.glob("*.yml")):
        return ["no CI workflow under .github/workflows/"]
    return []


def check_compatibility() -> list:
    pyproject = ROOT / "pyproject.toml"
    if not pyproject.exists():
        return ["pyproject.toml is missing"]
    text = pyproject.read_text("utf-8")
    if "requires-python" not in text:
        return ["pyproject.toml does not pin requires-python"]
    return []


def main() -> int:
    checks = {
        "R1 licensing": check_license,
        "R2 documentation": check_docs,
        "R3 compatibility (python floor pinned)": check_compatibility,
        "CI present": check_ci,
    }
    failed = False
    for name, check in checks.items():
        problems = check()
        if problems:
            failed = True
            for problem in problems:
                print("FAIL %s: %s" % (name, problem))
        else:
            print("OK   %s" % name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
