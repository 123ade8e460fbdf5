import pytest

from envrig.errors import DivergenceError, ResetRequiredError, ValidationError
from envrig.records import StepRecord, serialize_record
from envrig.registry import make_env, make_vector_env
from envrig.runtime import VectorEnv
from envrig.seeding import Rng, SeedTree


def scripted_actions(n, seed, dim=1):
    rng = Rng(seed)
    return [[rng.uniform(-1.0, 1.0) for _ in range(dim)] for _ in range(n)]


def standalone_stream(env_id, child_seed, actions):
    env = make_env(env_id, seed=child_seed)
    lines = []
    env.reset()
    done = False
    for action in actions:
        if done:
            obs, reward, done = env.reset(), 0.0, False
        else:
            obs, reward, done, _ = env.step(action)
        lines.append(serialize_record(StepRecord(env.sim_time, tuple(obs), tuple(action), reward, done)))
    env.close()
    return lines


def vector_streams(env_id, n, master, per_instance_actions, num_workers=None):
    venv = make_vector_env(env_id, n, seed=master, num_workers=num_workers)
    lines = [[] for _ in range(n)]
    venv.reset()
    for k in range(len(per_instance_actions[0])):
        actions = [per_instance_actions[i][k] for i in range(n)]
        for i, (obs, reward, done, _) in enumerate(venv.step(actions)):
            lines[i].append(
                serialize_record(
                    StepRecord(venv.envs[i].sim_time, tuple(obs), tuple(actions[i]), reward, done)
                )
            )
    venv.close()
    return lines


def test_concurrent_matches_sequential_standalone_envs():
    master, n, steps = 31, 4, 60
    scripts = [scripted_actions(steps, seed=1000 + i) for i in range(n)]
    concurrent = vector_streams("cartpole-balance", n, master, scripts, num_workers=4)
    tree = SeedTree(master)
    for i in range(n):
        reference = standalone_stream("cartpole-balance", tree.child(f"env-{i}"), scripts[i])
        assert concurrent[i] == reference


def test_single_instance_vector_env_equals_plain_env():
    actions = scripted_actions(40, seed=5)
    vec = vector_streams("cartpole-balance", 1, 7, [actions])
    plain = standalone_stream("cartpole-balance", SeedTree(7).child("env-0"), actions)
    assert vec[0] == plain


def test_child_seeds_are_distinct_and_give_distinct_inits():
    venv = make_vector_env("cartpole-balance", 8, seed=3)
    assert len(set(venv.child_seeds)) == 8
    observations = venv.reset()
    as_tuples = {tuple(obs) for obs in observations}
    assert len(as_tuples) == 8
    venv.close()


def test_action_length_mismatch():
    venv = make_vector_env("cartpole-balance", 2, seed=0)
    venv.reset()
    with pytest.raises(ValidationError):
        venv.step([[0.0]])
    venv.close()


def test_step_before_reset():
    venv = make_vector_env("cartpole-balance", 2, seed=0)
    with pytest.raises(ResetRequiredError):
        venv.step([[0.0], [0.0]])
    venv.close()


def test_auto_reset_returns_terminal_then_reset_observation():
    venv = make_vector_env("cartpole-balance", 1, seed=12)
    venv.reset()
    done = False
    while not done:
        ((obs, reward, done, info),) = venv.step([[1.0]])
    terminal_obs = obs
    ((obs, reward, done, info),) = venv.step([[1.0]])
    assert info == {"reset": True}
    assert reward == 0.0
    assert done is False
    assert obs != terminal_obs
    # The reset drew the next init sample; stepping resumes normally after.
    ((_, reward, _, info),) = venv.step([[0.0]])
    assert reward == 1.0 and "reset" not in info
    venv.close()


def test_scheduler_randomization_does_not_change_results():
    master, n, steps = 9, 4, 40
    scripts = [scripted_actions(steps, seed=2000 + i) for i in range(n)]
    reference = vector_streams("cartpole-balance", n, master, scripts, num_workers=1)
    rng = Rng(77)
    for _ in range(2):
        workers = 1 + rng.integer(8)
        assert vector_streams("cartpole-balance", n, master, scripts, workers) == reference


def test_divergence_isolates_to_one_instance():
    venv = make_vector_env("cartpole-balance", 3, seed=4)
    venv.reset()

    original_step = venv.envs[1].step

    def exploding_step(action):
        raise DivergenceError("synthetic blow-up")

    venv.envs[1].step = exploding_step
    results = venv.step([[0.0], [0.0], [0.0]])
    assert results[1][2] is True
    assert "error" in results[1][3]
    assert results[0][2] is False and results[2][2] is False
    venv.envs[1].step = original_step
    # next step auto-resets the poisoned instance, others keep going
    results = venv.step([[0.0], [0.0], [0.0]])
    assert results[1][3] == {"reset": True}
    assert results[0][2] is False
    venv.close()


def test_seed_rederives_children():
    venv = make_vector_env("cartpole-balance", 2, seed=1)
    children = venv.seed(99)
    tree = SeedTree(99)
    assert children == [tree.child("env-0"), tree.child("env-1")]
    obs_a = venv.reset()
    venv.seed(99)
    obs_b = venv.reset()
    assert obs_a == obs_b
    venv.close()


def test_vector_env_validates_n():
    with pytest.raises(ValidationError):
        VectorEnv(0, 1, lambda child: make_env("cartpole-balance", seed=child))


def test_closed_vector_env():
    venv = make_vector_env("cartpole-balance", 1, seed=0)
    venv.close()
    with pytest.raises(Exception):
        venv.reset()
