import pytest

from abyss.comms import (
    ACOUSTIC,
    BUILTIN_LINKS,
    PAPER_WIFI,
    DeliveryCurve,
    LinkSpec,
    Message,
    Transport,
    delivery_probability,
    latency,
)
from abyss.engine import SimEngine, derive_stream


def flat_link(p, name="test", bandwidth=1e6):
    return LinkSpec(name, bandwidth, 1e8, 0.0, DeliveryCurve(((1e9, p),)))


class TestDeliveryCurve:
    def test_paper_wifi_steps(self):
        assert delivery_probability(PAPER_WIFI, 0.05) == 1.0
        assert delivery_probability(PAPER_WIFI, 0.10) == 0.70
        assert delivery_probability(PAPER_WIFI, 0.15) == 0.0
        assert delivery_probability(PAPER_WIFI, 0.0) == 1.0

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            delivery_probability(PAPER_WIFI, -0.1)

    def test_breakpoints_must_increase(self):
        with pytest.raises(ValueError):
            DeliveryCurve(((0.1, 1.0), (0.1, 0.5)))

    def test_builtin_profiles_non_increasing(self):
        for link in BUILTIN_LINKS.values():
            probs = [p for _, p in link.curve.breakpoints] + [0.0]
            assert probs == sorted(probs, reverse=True)

    def test_max_range(self):
        assert PAPER_WIFI.curve.max_range() == 0.10
        assert ACOUSTIC.curve.max_range() == 1000.0


class TestLatency:
    def test_transmission_delay(self):
        link = flat_link(1.0, bandwidth=1e7)
        assert latency(link, 1e6, 0.0) == pytest.approx(0.1)

    def test_acoustic_propagation(self):
        assert latency(ACOUSTIC, 1e4, 1500.0) == pytest.approx(1.0 + 1.0)

    def test_random_params_match_formula(self):
        rng = derive_stream(11, "latency")
        for _ in range(50):
            bw = rng.uniform(1e3, 1e9)
            speed = rng.uniform(1e2, 3e8)
            fixed = rng.uniform(0, 0.1)
            size = rng.uniform(1, 1e7)
            d = rng.uniform(0, 5e3)
            link = LinkSpec("r", bw, speed, fixed, DeliveryCurve(((1e9, 1.0),)))
            assert latency(link, size, d) == pytest.approx(fixed + size / bw + d / speed)


class TestTransmit:
    def msg(self, i=0, kind="data"):
        return Message(f"m{i}", "a", "b", 1000.0, kind, {"i": i})

    def test_probability_one_always_delivers(self):
        eng = SimEngine(seed=5)
        tx = Transport(eng, flat_link(1.0))
        for i in range(200):
            assert tx.transmit(self.msg(i), 1.0).delivered
        eng.run_all()
        kinds = [e.kind for e in eng.log]
        assert kinds.count("SEND") == 200
        assert kinds.count("RECEIVE") == 200
        assert kinds.count("DROP") == 0

    def test_probability_zero_always_drops(self):
        eng = SimEngine(seed=5)
        tx = Transport(eng, flat_link(0.0))
        for i in range(200):
            assert not tx.transmit(self.msg(i), 1.0).delivered
        kinds = [e.kind for e in eng.log]
        assert kinds.count("DROP") == 200

    def test_bernoulli_rate_near_p(self):
        # 1e4 trials at p=0.7 should land within +/-0.02 (binomial 4+ sigma)
        eng = SimEngine(seed=321)
        tx = Transport(eng, flat_link(0.7))
        delivered = sum(tx.transmit(self.msg(i), 1.0).delivered for i in range(10_000))
        assert abs(delivered / 10_000 - 0.7) < 0.02

    def test_each_transmit_pairs_send_with_one_outcome(self):
        eng = SimEngine(seed=9)
        tx = Transport(eng, flat_link(0.5))
        n = 500
        for i in range(n):
            tx.transmit(self.msg(i), 1.0)
        eng.run_all()
        sends = [e for e in eng.log if e.kind == "SEND"]
        outcomes = [e for e in eng.log if e.kind in ("RECEIVE", "DROP")]
        assert len(sends) == n
        assert len(outcomes) == n
        # every message id appears exactly once in each set
        assert {e.payload["msg_id"] for e in sends} == {f"m{i}" for i in range(n)}
        assert {e.payload["msg_id"] for e in outcomes} == {f"m{i}" for i in range(n)}

    def test_fifo_per_pair_despite_variable_latency(self):
        # shrinking distances would reorder arrivals without the FIFO clamp
        link = LinkSpec("slow", 1e6, 10.0, 0.0, DeliveryCurve(((1e9, 1.0),)))
        eng = SimEngine(seed=1)
        tx = Transport(eng, link)
        for i, d in enumerate([100.0, 50.0, 1.0]):
            tx.transmit(self.msg(i), d)
        eng.run_all()
        received = [e.payload["msg_id"] for e in eng.log if e.kind == "RECEIVE"]
        assert received == ["m0", "m1", "m2"]

    def test_same_src_dst_rejected(self):
        eng = SimEngine(seed=0)
        tx = Transport(eng, flat_link(1.0))
        with pytest.raises(ValueError):
            tx.transmit(Message("m", "a", "a", 10.0, "x"), 1.0)
