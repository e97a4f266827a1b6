"""Smoke tests for the python bindings."""
import sys

import _textrts as rts


def test_grammar():
    report = rts.extract_actions("I will attack. <Attack_Unit(0x1a3)> then <No_Operation()>")
    names = [a["name"] for a in report["actions"]]
    assert names == ["Attack_Unit", "No_Operation"], names
    assert report["actions"][0]["args"][0]["tag"] == 0x1A3

    text = rts.format_action("Move_Minimap", [{"kind": "coord", "x": 12, "y": 60}])
    assert text == "<Move_Minimap([12, 60])>", text
    again = rts.extract_actions(text)
    assert again["actions"][0]["name"] == "Move_Minimap"

    msgs = rts.extract_messages("<MessageTo(Commander, '''enemy at base''')>")
    assert msgs == [("Commander", "enemy at base")], msgs


def test_metrics():
    assert rts.kd_ratio(300, 200) == 1.5
    assert rts.kd_ratio(100, 0) == "Inf"
    assert rts.kd_ratio(0, 0) == 0.0


def test_env_and_episode():
    env = rts.Env()
    assert env.action_count() >= 100
    assert "No_Operation" in env.action_names()
    scenarios = env.scenarios()
    assert "task1_l1" in scenarios and len(scenarios) >= 33

    result = env.run_episode("task4_l1", client="mock:focus-fire", seed=7)
    assert result["outcome"] in ("win", "lose", "draw")
    assert result["steps"] > 0

    repeat = env.run_episode("task4_l1", client="mock:focus-fire", seed=7)
    assert repeat["state_hash"] == result["state_hash"]


def main():
    test_grammar()
    test_metrics()
    test_env_and_episode()
    print("python smoke: ok")


if __name__ == "__main__":
    sys.exit(main())
