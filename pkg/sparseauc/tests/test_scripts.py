"""Os scripts de shell da raiz só usam variáveis que eles mesmos definem"""

import re
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]


@pytest.mark.parametrize("name", ["start.sh", "run.sh"])
def test_shell_variables_are_defined(name):
    text = (ROOT / name).read_text(encoding='utf-8')
    used = set(re.findall(r"\$\{(\w+)\}", text))
    defined = set(re.findall(r"^(\w+)=", text, flags=re.MULTILINE))
    assert used <= defined, f"variáveis sem definição em {name}: {sorted(used - defined)}"


def test_start_script_runs_the_package():
    text = (ROOT / "start.sh").read_text(encoding='utf-8')
    assert "pip install -r requirements.txt" in text
    assert "main.py config" in text
    assert (ROOT / "requirements.txt").exists()
