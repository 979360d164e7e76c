import json
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from conftest import v1, v2
from mbernoulli.cli import SystemDescription, main, run
from mbernoulli.errors import ValidationError

SYSTEMS = Path(__file__).resolve().parents[1] / "scripts" / "systems"


def write(tmp_path, data, name="sys.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def out(*argv):
    code, text = run(list(argv))
    assert code == 0, text
    return text


def test_ber_a2_golden():
    text = out("ber", str(SYSTEMS / "a2.json"), "--at", "1/5,1/2")
    expected = -(1 + v1 - 2 * v2) * (v1 - 1 + v2) * (2 * v1 - v2) / 6
    assert f"polynomial: {expected.render()}" in text.splitlines()
    assert "value: -1/1000" in text


def test_jump_phi3_golden():
    text = out("jump", str(SYSTEMS / "phi3.json"), "--at1", "1/2", "--at2", "-1/2")
    assert text.splitlines()[0] == "jump: t^2/2"
    assert "check: ok" in text


def test_decompose_golden():
    text = out("decompose", str(SYSTEMS / "a2.json"), "--beta", "1/2,1/5", "--at", "9/5,1/4")
    lines = text.splitlines()
    assert lines[0] == "affine_subspace\tpolynomial\tvalue"
    assert len(lines) == 1 + 4 + 3
    assert [ln.split("\t")[0] for ln in lines[1:5]] == ["V", "R(e2) + e1", "R(e1+e2) - e2", "{(1, 0)}"]
    assert "total: -7/8000" in lines
    assert "check: ok" in lines


def test_decompose_beta_prime_three_terms():
    text = out("decompose", str(SYSTEMS / "a2.json"), "--beta", "7/10,1/2", "--at", "9/5,1/4")
    assert len(text.splitlines()) == 1 + 3 + 3
    assert "total: -7/8000" in text


def test_user_coordinates(tmp_path):
    # Λ = Z(2,0) + Z(0,1) with Φ = [(2,0),(0,1),(2,1)] is A2 with v1 halved
    path = write(tmp_path, {"dimension": 2, "lattice_basis": [[2, 0], [0, 1]],
                            "phi": [[2, 0], [0, 1], [2, 1]]})
    text = out("ber", path, "--at", "2/5,1/2")
    assert "value: -1/1000" in text
    # rational multiples rescale by the inverse factor
    path = write(tmp_path, {"dimension": 2, "phi": [["1/2", 0], [0, 1], [1, 1]]}, "half.json")
    text = out("ber", path, "--at", "1/5,1/2")
    assert "tope:" in text


def test_em_command():
    text = out("em", str(SYSTEMS / "a2.json"), "--gaussian", "1/2,1/3,1/3")
    err = float(text.splitlines()[-1].split(":")[1])
    assert err <= 1e-6


def test_em_skew_lattice(tmp_path):
    path = write(tmp_path, {"dimension": 2, "lattice_basis": [[1, 0], [1, 2]], "phi": [[1, 0], [1, 2], [2, 2]]})
    text = out("em", path, "--gaussian", "1/3,0,1/4")
    assert float(text.splitlines()[-1].split(":")[1]) <= 1e-6


def test_fourier_and_affine():
    text = out("fourier", str(SYSTEMS / "b2.json"), "--at", "7/10,-1/10", "--N", "100")
    assert float(text.splitlines()[-1].split(":")[1]) < 1e-5
    text = out("affine", str(SYSTEMS / "affine1d.json"), "--at", "1/4")
    assert text.startswith("value: ")


def test_plot1d():
    text = out("plot1d", str(SYSTEMS / "phi2.json"), "--range", "-1..1", "--samples", "9")
    lines = text.splitlines()
    assert lines[0] == "t,value"
    assert len(lines) == 1 + 9 - 3  # -1, 0, 1 lie on walls
    t, val = map(float, lines[1].split(","))
    assert t == -0.75 and abs(val - (-(0.25 ** 2 - 0.25 + 1 / 6) / 2)) < 1e-12


def test_json_output():
    text = out("--json", "ber", str(SYSTEMS / "a2.json"), "--at", "1/5,1/2")
    assert json.loads(text)["value"] == "-1/1000"


def test_exit_codes(tmp_path, capsys):
    a2 = str(SYSTEMS / "a2.json")
    assert main(["ber", a2, "--at", "1/2,1/2"]) == 2
    assert main(["decompose", a2, "--beta", "0,0", "--at", "9/5,1/4"]) == 3
    assert "suggestion:" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["ber", str(bad), "--at", "1/5,1/2"]) == 2
    assert main(["ber", write(tmp_path, {"dimension": 2, "phi": [[1, 0]]}, "ns.json"), "--at", "1/5,1/2"]) == 2
    assert main(["jump", a2, "--at1", "1/5,1/2", "--at2", "3/5,-1/2"]) == 2
    assert main(["plot1d", a2, "--range", "0..1"]) == 2


@pytest.mark.parametrize("data,msg", [
    ({"phi": [[1]]}, "dimension"),
    ({"dimension": 1, "phi": []}, "phi"),
    ({"dimension": 1, "phi": [[0]]}, "zero"),
    ({"dimension": 1, "phi": [{"vector": [1], "multiplicity": 0}]}, "multiplicity"),
    ({"dimension": 1, "phi": [[1]], "lattice_basis": [[0]]}, "singular"),
    ({"dimension": 1, "phi": [["x"]]}, "rational"),
    ({"dimension": 1, "phi": [[1]], "extra": 1}, "unknown"),
])
def test_validation(data, msg):
    with pytest.raises(ValidationError, match=msg):
        SystemDescription.from_dict(data)


def test_deterministic():
    argv = ["decompose", str(SYSTEMS / "a2.json"), "--beta", "1/2,1/5", "--at", "9/5,1/4"]
    assert run(argv) == run(argv)


rat = st.fractions(min_value=-5, max_value=5, max_denominator=12)


@settings(max_examples=30, deadline=None)
@given(
    st.integers(1, 3).flatmap(lambda r: st.tuples(
        st.just(r),
        st.lists(st.tuples(st.lists(rat, min_size=r, max_size=r).filter(any), st.integers(1, 3),
                           st.one_of(st.none(), rat)), min_size=1, max_size=4),
        st.one_of(st.none(), st.lists(st.lists(rat, min_size=r, max_size=r), min_size=r, max_size=r)),
    ))
)
def test_round_trip(data):
    r, phi, gram = data
    d = {"dimension": r, "phi": [{"vector": [str(x) for x in v], "multiplicity": m, **({"z": str(z)} if z is not None else {})}
                                 for v, m, z in phi]}
    if gram is not None:
        d["gram"] = [[str(x) for x in row] for row in gram]
    desc = SystemDescription.from_dict(d)
    again = SystemDescription.from_dict(json.loads(json.dumps(desc.to_dict())))
    assert again == desc
    assert again.to_dict() == desc.to_dict()
