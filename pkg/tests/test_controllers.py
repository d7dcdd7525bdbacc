import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyctrain.controllers import (
    ControllerRanges,
    CyclicalRange,
    hp_ratio,
    lr_at_epoch,
    ratio_in_range,
    resolve_batch_size,
    resolve_clip,
    resolve_epoch,
    resolve_momentum,
    resolve_temperature,
    resolve_weight_decay,
)


class TestResolvers:
    def test_weight_decay_easy_endpoint_is_minimum(self):
        assert resolve_weight_decay(1e-4, 1e-3, 1.0) == 1e-4

    def test_weight_decay_degenerate_range_is_constant(self):
        for coeff in (0.0, 0.25, 1.0):
            assert resolve_weight_decay(5e-4, 5e-4, coeff) == 5e-4

    def test_weight_decay_midpoint(self):
        assert resolve_weight_decay(1e-5, 3e-5, 0.5) == pytest.approx(2e-5, rel=1e-12)

    def test_weight_decay_rejects_bad_range(self):
        with pytest.raises(ValueError):
            resolve_weight_decay(-1e-4, 1e-3, 0.5)
        with pytest.raises(ValueError):
            resolve_weight_decay(1e-3, 1e-4, 0.5)

    def test_temperature_easy_endpoint_is_low(self):
        assert resolve_temperature(0.5, 2.0, 1.0) == 0.5

    def test_temperature_unit_range_is_plain_softmax(self):
        for coeff in (0.0, 0.7, 1.0):
            assert resolve_temperature(1.0, 1.0, coeff) == 1.0

    def test_temperature_midpoint(self):
        assert resolve_temperature(0.5, 2.0, 0.5) == pytest.approx(1.25, rel=1e-12)

    def test_temperature_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            resolve_temperature(0.0, 2.0, 0.5)
        with pytest.raises(ValueError):
            resolve_temperature(-0.5, 2.0, 0.5)

    def test_clip_tight_threshold_is_easy(self):
        assert resolve_clip(4.0, 10.0, 1.0) == 4.0

    def test_clip_loose_threshold_is_hard(self):
        assert resolve_clip(4.0, 10.0, 0.0) == 10.0

    def test_clip_midpoint(self):
        assert resolve_clip(4.0, 10.0, 0.5) == pytest.approx(7.0, rel=1e-12)

    def test_clip_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            resolve_clip(0.0, 10.0, 0.5)

    def test_batch_size_easy_endpoint_is_largest(self):
        assert resolve_batch_size(64, 384, 1.0) == 384

    def test_batch_size_hard_endpoint_is_smallest(self):
        assert resolve_batch_size(64, 384, 0.0) == 64

    def test_batch_size_midpoint_rounds_half_up(self):
        assert resolve_batch_size(64, 384, 0.5) == 224

    def test_batch_size_rejects_below_one(self):
        with pytest.raises(ValueError):
            resolve_batch_size(0, 64, 0.5)

    def test_momentum_easy_endpoint_is_low(self):
        assert resolve_momentum(0.85, 0.95, 1.0) == 0.85

    def test_momentum_constant(self):
        for coeff in (0.0, 0.5, 1.0):
            assert resolve_momentum(0.9, 0.9, coeff) == 0.9

    def test_momentum_blend(self):
        assert resolve_momentum(0.85, 0.95, 0.25) == pytest.approx(0.925, rel=1e-12)

    def test_momentum_rejects_outside_unit(self):
        with pytest.raises(ValueError):
            resolve_momentum(0.5, 1.0, 0.5)
        with pytest.raises(ValueError):
            resolve_momentum(-0.1, 0.5, 0.5)

    @given(coeff=st.floats(min_value=0.0, max_value=1.0))
    @settings(max_examples=200)
    def test_all_resolvers_stay_inside_ranges(self, coeff):
        assert 1e-4 <= resolve_weight_decay(1e-4, 1e-3, coeff) <= 1e-3
        assert 0.5 <= resolve_temperature(0.5, 2.0, coeff) <= 2.0
        assert 4.0 <= resolve_clip(4.0, 10.0, coeff) <= 10.0
        assert 64 <= resolve_batch_size(64, 384, coeff) <= 384
        assert 0.85 <= resolve_momentum(0.85, 0.95, coeff) <= 0.95


class TestHpRatio:
    def test_reference_configuration_in_range(self):
        r = hp_ratio(0.15, 5e-4, 384, 0.9)
        assert r == pytest.approx(1.953125e-6, rel=1e-9)
        assert ratio_in_range(r)

    def test_second_reference_configuration(self):
        r = hp_ratio(0.6, 2e-5, 192, 0.9)
        assert r == pytest.approx(6.25e-7, rel=1e-9)
        assert ratio_in_range(r)

    def test_zero_numerator_out_of_range(self):
        r = hp_ratio(0.0, 5e-4, 64, 0.9)
        assert r == 0.0
        assert not ratio_in_range(r)

    def test_momentum_one_rejected(self):
        with pytest.raises(ValueError):
            hp_ratio(0.1, 5e-4, 64, 1.0)

    def test_batch_size_below_one_rejected(self):
        with pytest.raises(ValueError):
            hp_ratio(0.1, 5e-4, 0, 0.9)


class TestLrPolicy:
    def test_constant_schedule(self):
        assert lr_at_epoch(0.1, 17, 60) == 0.1

    def test_warmup_ramp(self):
        assert lr_at_epoch(0.1, 0, 60, "cosine", warmup_epochs=3, warmup_lr=0.01) == 0.01
        mid = lr_at_epoch(0.1, 1, 60, "cosine", warmup_epochs=3, warmup_lr=0.01)
        assert mid == pytest.approx(0.01 + (0.1 - 0.01) / 3)

    def test_cosine_starts_at_base_and_decays(self):
        first = lr_at_epoch(0.1, 3, 60, "cosine", warmup_epochs=3)
        assert first == pytest.approx(0.1)
        values = [lr_at_epoch(0.1, e, 60, "cosine", warmup_epochs=3) for e in range(3, 60)]
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert values[-1] > 0.0

    def test_epochs_past_end_hold_final_value(self):
        assert lr_at_epoch(0.1, 75, 60, "cosine") == lr_at_epoch(0.1, 60, 60, "cosine")

    def test_unknown_schedule_rejected(self):
        with pytest.raises(ValueError):
            lr_at_epoch(0.1, 0, 60, "poly")


def base_ranges(**overrides):
    kw = dict(total_epochs=5, lr=0.1, weight_decay=5e-4, momentum=0.9,
              batch_size=64, temperature=1.0)
    kw.update(overrides)
    return ControllerRanges(**kw)


class TestResolveEpoch:
    def test_all_disabled_gives_base_values_every_epoch(self):
        ranges = base_ranges()
        for e in range(5):
            hp = resolve_epoch(ranges, e)
            assert (hp.lr, hp.weight_decay, hp.momentum, hp.batch_size,
                    hp.temperature, hp.clip_threshold) == (0.1, 5e-4, 0.9, 64, 1.0, None)

    def test_cyclical_weight_decay_peaks_mid_cycle(self):
        ranges = base_ranges(wd_range=CyclicalRange(1e-4, 1e-3, 2))
        hp = resolve_epoch(ranges, 2)
        assert hp.weight_decay == 1e-3
        assert hp.temperature == 1.0
        assert hp.batch_size == 64

    def test_cyclical_temperature_starts_low_with_monotone_factor(self):
        ranges = base_ranges(t_range=CyclicalRange(0.5, 2.0, 1))
        assert resolve_epoch(ranges, 0).temperature == 0.5
        assert resolve_epoch(ranges, 4).temperature == 2.0

    def test_orientation_at_fully_easy_epoch(self):
        ranges = base_ranges(
            wd_range=CyclicalRange(1e-4, 1e-3, 2),
            t_range=CyclicalRange(0.5, 2.0, 2),
            clip_range=CyclicalRange(4.0, 10.0, 2),
            bs_range=CyclicalRange(64, 384, 2),
            m_range=CyclicalRange(0.85, 0.95, 2),
        )
        hp = resolve_epoch(ranges, 0)
        assert hp.weight_decay == 1e-4
        assert hp.temperature == 0.5
        assert hp.clip_threshold == 4.0
        assert hp.batch_size == 384
        assert hp.momentum == 0.85

    def test_containment_across_all_epochs(self):
        ranges = base_ranges(
            total_epochs=37,
            wd_range=CyclicalRange(1e-4, 1e-3, 4),
            t_range=CyclicalRange(0.5, 2.0, 1),
            clip_range=CyclicalRange(4.0, 10.0, 2),
            bs_range=CyclicalRange(64, 384, 3),
            m_range=CyclicalRange(0.85, 0.95, 1.5),
        )
        for e in range(37):
            hp = resolve_epoch(ranges, e)
            assert 1e-4 <= hp.weight_decay <= 1e-3
            assert 0.5 <= hp.temperature <= 2.0
            assert 4.0 <= hp.clip_threshold <= 10.0
            assert 64 <= hp.batch_size <= 384
            assert 0.85 <= hp.momentum <= 0.95

    def test_degenerate_ranges_match_base_exactly(self):
        plain = base_ranges(clip=5.0)
        degenerate = base_ranges(
            clip=5.0,
            wd_range=CyclicalRange(5e-4, 5e-4, 2),
            t_range=CyclicalRange(1.0, 1.0, 1),
            clip_range=CyclicalRange(5.0, 5.0, 2),
            bs_range=CyclicalRange(64, 64, 2),
            m_range=CyclicalRange(0.9, 0.9, 4),
        )
        for e in range(5):
            assert resolve_epoch(plain, e) == resolve_epoch(degenerate, e)

    def test_invalid_range_rejected_at_construction(self):
        with pytest.raises(ValueError):
            base_ranges(wd_range=CyclicalRange(1e-3, 1e-4, 2))
        with pytest.raises(ValueError):
            base_ranges(t_range=CyclicalRange(0.5, 2.0, 0.5))
        with pytest.raises(ValueError):
            base_ranges(m_range=CyclicalRange(0.9, 1.0, 2))

    def test_per_controller_factors_are_independent(self):
        ranges = base_ranges(
            wd_range=CyclicalRange(1e-4, 1e-3, 2),
            t_range=CyclicalRange(0.5, 2.0, 1),
        )
        hp = resolve_epoch(ranges, 4)
        assert hp.weight_decay == 1e-4  # factor 2 returned to easy
        assert hp.temperature == 2.0    # factor 1 ended hard
