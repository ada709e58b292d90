import io

from dendrite.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(["--no-timestamp", *argv], out)
    return code, out.getvalue()


def fields(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


def test_check_tau_examples():
    code, out = call("check-tau", "--tau", "[10*]")
    assert code == 0 and fields(out)["verdict"] == "acceptable"
    code, out = call("check-tau", "--tau", "[1*]")
    f = fields(out)
    assert code == 1 and f["verdict"] == "not-acceptable" and f["n"] == "1"


def test_delta_for_eps_examples():
    code, out = call("delta-for-eps", "--tau", "[10*]", "--eps-exp", "4")
    assert code == 0 and fields(out)["n_delta"] == "33"
    code, out = call("delta-for-eps", "--tau", "1[0]", "--eps", "0.0625")
    assert code == 0 and fields(out)["n_delta"] == "13"


def test_invalid_input_exits_two():
    assert call("check-tau", "--tau", "10")[0] == 2
    assert call("no-such-command")[0] == 2
    assert call("delta-for-eps", "--tau", "[10*]")[0] == 2
    code, out = call("orbit", "gen")
    assert code == 2 and "error" in out


def test_classify_and_simeq():
    code, out = call("classify-tau", "--tau", "period-doubling", "--depth", "512", "--milestones", "4")
    f = fields(out)
    assert code == 0 and f["kind"] == "RECURRENT_NONPERIODIC" and f["milestones"] == "1 6 10 18"
    code, out = call("simeq", "--tau", "1[0]", "--x", "10110", "--y", "10010")
    f = fields(out)
    assert code == 0 and f["witness"] == "10*10" and f["star_position"] == "2"
    assert call("simeq", "--tau", "1[0]", "--x", "00000", "--y", "11111")[0] == 1
    code, out = call("distance", "--tau", "1[0]", "--x", "1[1]", "--y", "0[0]")
    assert fields(out)["agreement"] == "FAIL_AT 1"


def test_orbit_and_shadow_pipeline(tmp_path):
    path = tmp_path / "orbit.txt"
    code, out = call("orbit", "gen", "--tau", "1[0]", "--eps-exp", "3", "--length", "50",
                     "--seed", "3", "--out", str(path))
    assert code == 0 and fields(out)["n_delta"] == "11"
    assert call("orbit", "check", "--file", str(path))[0] == 0
    code, out = call("orbit", "check", "--file", str(path), "--delta-exp", "40")
    assert code == 1 and "first_violation" in fields(out)
    code, out = call("shadow", "--file", str(path), "--eps-exp", "3", "--policy", "ALL_ONE")
    f = fields(out)
    assert code == 0 and f["verified"] == "true" and f["pseudo_agreement"] == "true"
    # the orbit's delta is too coarse for eps = 2^-4
    assert call("shadow", "--file", str(path), "--eps-exp", "4")[0] == 2
    assert call("shadow", "--file", str(tmp_path / "missing.txt"), "--eps-exp", "3")[0] == 2


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DENDRITE_SEED", "7")
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    call("orbit", "gen", "--tau", "[10*]", "--eps-exp", "3", "--length", "30", "--out", str(a))
    call("orbit", "gen", "--tau", "[10*]", "--eps-exp", "3", "--length", "30", "--seed", "7",
         "--out", str(b))
    assert a.read_text() == b.read_text()


def test_ict_and_omega_commands(tmp_path):
    s = tmp_path / "set.txt"
    s.write_text("tau: 1[0]\n[011]\n[110]\n[101]\n")
    code, out = call("ict", "check", "--set", str(s), "--eps-exp", "4")
    assert code == 0 and fields(out)["ict"] == "true"
    bad = tmp_path / "bad.txt"
    bad.write_text("tau: 1[0]\n[0]\n[1]\n")
    code, out = call("ict", "check", "--set", str(bad), "--eps-exp", "4")
    assert code == 1 and fields(out)["weakly_incompressible"] == "false"
    w = tmp_path / "z.txt"
    code, out = call("omega", "build", "--set", str(s), "--depth", "600", "--out", str(w))
    assert code == 0 and int(fields(out)["depth"]) >= 600
    code, out = call("omega", "verify", "--set", str(s), "--z-file", str(w), "--eps-exp", "4",
                     "--horizon", "580", "--burn-in", "100")
    assert code == 0 and fields(out)["holds"] == "true"
    # default window stays inside the built point's certified depth
    code, out = call("omega", "verify", "--set", str(s), "--z-file", str(w), "--eps-exp", "4")
    assert code == 0 and fields(out)["holds"] == "true"
    code, out = call("omega", "approx", "--tau", "1[0]", "--z", "0010[011]", "--eps-exp", "4",
                     "--horizon", "200", "--burn-in", "20")
    assert code == 0 and fields(out)["clusters"] == "3"


def test_julia_commands(tmp_path):
    code, out = call("julia", "detect", "--c", "i")
    assert code == 0 and fields(out)["verdict"] == "MISIUREWICZ{1,2}"
    code, out = call("julia", "kneading", "--c", "i")
    assert code == 0 and fields(out)["tau"] == "1[10]"
    assert call("julia", "kneading", "--c", "0")[0] == 2
    assert call("julia", "detect", "--c", "nonsense")[0] == 2
    img = tmp_path / "j.ppm"
    code, out = call("julia", "render", "--c", "i", "--width", "20", "--height", "10",
                     "--out", str(img))
    assert code == 0 and img.read_bytes().startswith(b"P6\n20 10\n255\n")


def test_battery_command(tmp_path):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("taus: [10*], 1[0]\neps_exps: 3\norbits: 2\norbit_length: 30\ncriteria: 2, 8\n")
    code, out = call("battery", "--config", str(cfg))
    assert code == 0
    assert "criterion 2 [PASS]" in out and "criterion 8 [PASS]" in out
    assert call("battery", "--config", str(tmp_path / "nope.cfg"))[0] == 2
    broken = tmp_path / "broken.cfg"
    broken.write_text("orbits two\n")
    assert call("battery", "--config", str(broken))[0] == 2


def test_battery_adversarial_delta(tmp_path):
    cfg = tmp_path / "adv.cfg"
    cfg.write_text("taus: [10*]\neps_exps: 4\norbits: 10\norbit_length: 60\n"
                   "adversarial: true\ncriteria: 4\n")
    code, out = call("battery", "--config", str(cfg))
    assert code == 1 and "criterion 4 [FAIL]" in out


def test_reports_are_deterministic():
    a = call("delta-for-eps", "--tau", "period-doubling", "--eps-exp", "3")
    b = call("delta-for-eps", "--tau", "period-doubling", "--eps-exp", "3")
    assert a == b and fields(a[1])["n_delta"] == "1044"
    out = io.StringIO()
    run(["check-tau", "--tau", "[*]"], out)
    assert out.getvalue().startswith("timestamp: ")
