from src.cache import TrialCache


def test_trial_roundtrip(tmp_path):
    cache = TrialCache(str(tmp_path / "trials.db"))
    assert cache.get_trial("abc", "varyd", 0, 1, 2) is None

    cache.save_trial("abc", "varyd", 0, 1, 2, (3, 4.5, 2, 0.125, 0.0, 0, 15, True, 0.3))
    assert cache.get_trial("abc", "varyd", 0, 1, 2) == [3, 4.5, 2, 0.125, 0.0, 0, 15, True, 0.3]
    assert cache.get_trial("abc", "s10", 0, 1, 2) is None
    assert cache.count_trials("abc") == 1
    cache.close()


def test_one_instance_per_database(tmp_path):
    path = str(tmp_path / "trials.db")
    assert TrialCache(path) is TrialCache(path)
    assert TrialCache(path) is not TrialCache(str(tmp_path / "other.db"))


def test_clearing(tmp_path):
    cache = TrialCache(str(tmp_path / "clear.db"))
    for trial in range(3):
        cache.save_trial("first", "varyd", 0, 0, trial, [trial])
    cache.save_trial("second", "varyd", 0, 0, 0, [1])

    cache.clear_experiment("first")
    assert cache.count_trials("first") == 0
    assert cache.count_trials("second") == 1

    assert cache.count_trials() == 1
    assert cache.count_experiments() == 1

    cache.clear_all_cache()
    assert cache.count_trials("second") == 0
    assert cache.count_experiments() == 0
