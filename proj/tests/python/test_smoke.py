import pytest

import teleran


def short_config(policy="C-SA", vehicles=2, seconds=2.0):
    return teleran.config(
        "default",
        experiment__policy=policy,
        experiment__num_vehicles=vehicles,
        experiment__episode_duration_s=seconds,
        experiment__test_episodes=2,
        experiment__train_episodes=0,
    )


def test_kpi_examples():
    assert teleran.prp(67, 67) == 1.0
    assert teleran.prp(0, 0) == 1.0
    assert teleran.qos(0.030, 1.0) == 1
    assert teleran.qos(0.060, 1.0) == 0
    assert teleran.qos(0.030, 0.9) == 0
    assert teleran.qoe(0.0) == pytest.approx(1.0)
    assert teleran.qoe(13.5) == pytest.approx(0.7)
    assert teleran.qoe(31.5) == pytest.approx(0.3)
    assert teleran.reward(0.025, 1, 0.7) == pytest.approx(0.7)
    assert teleran.reward(0.025, 1, 0.7, alpha=0.5) == pytest.approx(0.5 * 0.5 + 0.5 * 0.7)
    assert teleran.reward(0.025, 0, 0.7) == 0.0


def test_chamfer_and_quantile():
    assert teleran.chamfer_distance([[0, 0, 0]], [[3, 4, 0]]) == pytest.approx(50.0)
    assert teleran.chamfer_distance([[1, 2, 3]], [[1, 2, 3]]) == 0.0
    assert teleran.quantile([1.0, 2.0, 3.0, 4.0, 5.0], 0.5) == pytest.approx(3.0)


def test_mcs_lookup():
    idx, eff, outage = teleran.mcs_for_snr(-10.0)
    assert outage
    idx, eff, outage = teleran.mcs_for_snr(30.0)
    assert not outage
    assert idx == 28
    assert eff == pytest.approx(7.4)
    effs = [teleran.mcs_for_snr(s)[1] for s in range(-5, 30)]
    assert effs == sorted(effs)


def test_config_overrides_and_validation():
    cfg = teleran.config("default", experiment__num_vehicles=1)
    assert cfg["experiment"]["num_vehicles"] == 1
    assert cfg["radio"]["pathloss_exponent"] == pytest.approx(3.7)
    with pytest.raises(ValueError):
        teleran.config("default", radio__tx_power_dbm=27.0)
    with pytest.raises(ValueError):
        teleran.config("no-such-preset")


def test_episode_conserves_bytes():
    cfg = short_config()
    out = teleran.run_episode(cfg, 7)
    assert len(out["bytes"]) == 2
    assert all(b["conserved"] for b in out["bytes"])
    assert len(out["vehicles"]) == 2
    for v in out["vehicles"]:
        assert v["windows"] == 20
        assert v["mode_counts"] == [0, 0, 20]
        assert v["mean_qoe"] == pytest.approx(0.3)
    again = teleran.run_episode(cfg, 7)
    assert again["mean_reward"] == out["mean_reward"]


def test_campaign_summarize_and_replay(tmp_path):
    cfg = short_config(policy="D-S")
    out = teleran.run_campaign(cfg, tmp_path / "run")
    assert out["train_episodes"] == 0
    assert out["test_episodes"] == 2
    assert 0.0 <= out["mean_reward"] <= 1.0
    teleran.summarize(str(tmp_path))
    assert (tmp_path / "run" / "summary.csv").exists()
    check = teleran.replay_check(str(tmp_path / "run"))
    assert check["identical"]
    assert "summary.csv" in check["compared"]
    assert check["differing"] == []
