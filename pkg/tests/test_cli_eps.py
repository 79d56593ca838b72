import json

from test_cli import run_cli


def test_eps_override_round_trips_through_verify(tmp_path):
    # a certificate computed at an overridden tolerance must still verify
    # against the original document (the certificate's eps wins)
    code, doc, _ = run_cli(["random", "--seed", "8", "--t", "2", "--k", "1",
                            "--dims", "3,2", "--field", "c"])
    assert code == 0
    wfile = str(tmp_path / "w.json")
    code, _, _ = run_cli(["regularize", "--mode", "star", "--eps", "1e-8",
                          "--witness", wfile], doc)
    assert code == 0
    assert json.loads(open(wfile).read())["field"]["eps"] == 1e-8
    code, out, _ = run_cli(["verify", "--witness", wfile], doc)
    assert code == 0
