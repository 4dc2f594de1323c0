import pytest

import twoparty


def test_catalog_lists_protocols():
    ids = {e["id"] for e in twoparty.catalog()}
    assert {"rabin-ot", "coin-flip-qrp", "tscp", "zkp-qrp", "bc-dlp"} <= ids
    rabin = next(e for e in twoparty.catalog() if e["id"] == "rabin-ot")
    assert rabin["params"]["bits"] == "64"


def test_run_is_deterministic_and_transport_free():
    a = twoparty.run("rabin-ot", {"bits": "64"}, 1, 2)
    b = twoparty.run("rabin-ot", {"bits": "64"}, 1, 2, transport="loopback")
    assert a["completed"] and a["abort"] is None
    assert a["messages"] == 3
    assert a["log"] == b["log"]


def test_log_verifies_and_tampering_is_caught():
    log = twoparty.run("zkp-graph", {}, 5, 6)["log"]
    session_id = twoparty.verify_transcript(log)
    assert len(session_id) == 16
    lines = log.splitlines(keepends=True)
    i = next(n for n, l in enumerate(lines) if " Response " in l)
    last = lines[i][-2]
    lines[i] = lines[i][:-2] + ("1" if last == "0" else "0") + "\n"
    with pytest.raises(twoparty.Error):
        twoparty.verify_transcript("".join(lines))
    with pytest.raises(twoparty.FramingError):
        twoparty.verify_transcript(log[: len(log) // 2])


def test_cheat_reports_abort():
    r = twoparty.run("coin-flip-qrp", {"bits": "32", "cheat": "non-blum"}, 3, 4)
    assert not r["completed"]
    assert r["abort"]["detected_by"] == "B"
    assert r["abort"]["kind"] == "verification"


def test_stats_rate():
    s = twoparty.stats("rabin-ot", {"bits": "32"}, trials=2000, first_seed=7)
    rate = s["rates"]["success_rate"]
    assert abs(rate["rate"] - 0.5) < 0.05
    lo, hi = rate["ci95"]
    assert lo <= rate["rate"] <= hi


def test_unknown_protocol_and_bad_options():
    with pytest.raises(twoparty.InvalidArgument):
        twoparty.run("nope")
    with pytest.raises(twoparty.InvalidArgument):
        twoparty.run("rabin-ot", {"colour": "blue"})


def test_number_theory_helpers():
    assert twoparty.jacobi(5, 21) == 1
    assert twoparty.four_square_roots(4, 3, 7) == [2, 5, 16, 19]
    assert sorted(twoparty.factor_from_roots(2, 16, 21)) == [3, 7]
    big_p, big_q = 2**61 - 1, 2**89 - 1
    assert twoparty.jacobi(3, big_p * big_q) in (-1, 1)
