"""Smoke test for the dacspec extension module.

Build and install with `maturin develop -m crates/python/Cargo.toml`, or put
the compiled library on PYTHONPATH as `dacspec.so`, then run this file.
"""

import math

import dacspec


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    close(dacspec.convert_energy(17.0, "THz", "meV"), 70.306, 1e-3)
    mean, half, n = dacspec.mean_with_ci([1.0, 2.0, 3.0])
    assert n == 3 and mean == 2.0 and half > 0

    s = dacspec.synth_spectrum([1.69], [0.02], [1000.0], (1.6, 1.8, 201), baseline=10.0)
    fit = dacspec.fit_peaks(s, 1)
    center, fwhm, amplitude = fit.peaks[0]
    close(center, 1.69, 1e-9)
    close(fwhm, 0.02, 1e-9)
    assert fit.converged and len(fit.covariance) == 4

    doublet = dacspec.synth_spectrum(
        [2.315, 2.345], [0.02, 0.02], [1000.0, 800.0], (2.2, 2.48, 281),
        baseline=50.0, noise=10.0, seed=140,
    )
    assert dacspec.select_model(doublet).n_peaks == 2

    close(dacspec.vinet_pressure(0.95), 86.1238, 1e-4)
    close(dacspec.lattice_ratio_from_pressure(180.0), 0.913429, 1e-6)
    theory = dacspec.EosParams.shipped("theory")
    assert dacspec.vinet_pressure(1.0, theory) == 0.0

    ruby = dacspec.ruby_pressure(718.722)
    raman = dacspec.raman_edge_pressure(1504.0)
    both = dacspec.combine_gauges([ruby, raman])
    assert ruby.sigma < both.value and both.sigma < ruby.sigma

    cal = dacspec.Calibration.bundled("SiV")
    assert cal.range == (1.0, 180.0)
    e = cal.eval(79.0)
    close(cal.zpl_pressure(e).value, 79.0, 1e-6)
    again = dacspec.Calibration.from_document(cal.to_document())
    assert again.points == cal.points

    slope, stderr, _, _ = dacspec.linear_slope(cal.points, (0.0, 20.0))
    assert 0.8 <= slope <= 1.2 and stderr >= 0

    aligned = dacspec.align_theory([(0.0, 1.57), (10.0, 1.58)], dacspec.experimental_zpl0("SiV"))
    close(aligned[0][1], 1.68, 1e-12)

    trace = dacspec.LevelTrace.bundled("GeV")
    assert trace.ks_zpl_shift()[0] == (0.0, 0.0)
    assert trace.vbm_referenced_shift("eg")[0] == (0.0, 0.0)

    try:
        cal.invert(1.5)
    except dacspec.DacspecError as exc:
        assert "extrapolate" in str(exc)
    else:
        raise AssertionError("expected an extrapolation error")

    assert math.isfinite(fit.center_energy()[0])
    print("dacspec smoke test passed")


if __name__ == "__main__":
    main()
