"""bsvsim command line.

Subcommands write CSV tables and a JSON summary into the output directory
(``--out-dir``, else ``$BSVSIM_OUTPUT_DIR``, else the working directory).
Exit codes: 0 ok, 2 usage or domain error, 3 resource limit, 4 fit failure.
"""
import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .classical import ClassicalSourceSpec, arcsine_ks_distance, classical_interference_samples
from .detection import delta_histogram, delta_values, joint_distribution, noise_reduction_factor
from .errors import DomainError, FitError, ResourceLimitError
from .filtering import (MacroAmplitudes, effective_overlap, filter_condition, gamma_family,
                        macro_joint_distribution, total_variation)
from .fock import BeamSplitterSpec, PhotonDistribution, bs_output_probabilities
from .multimode import (choose_count_model, conditional_multimode_distribution, effective_mode_count,
                        gaussian_sample_bsv, mode_profile, multimode_joint_distribution)
from .sampling import g2_cross
from .source import TwinBeamSpec, fit_gain

OUTPUT_ENV = "BSVSIM_OUTPUT_DIR"
# flags that never change results and so stay out of the embedded config
_NOT_CONFIG = {"out_dir", "threads", "func"}


def _config(args):
    return {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}


def _out_dir(args):
    path = Path(args.out_dir or os.environ.get(OUTPUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _splitter(args):
    return BeamSplitterSpec(args.tau, args.phi_tau, args.phi_rho)


def _histogram_series(hist):
    return hist.bin_centers, hist.masses


# ---------------------------------------------------------------------------
# fock
# ---------------------------------------------------------------------------

def run_fock(args):
    cfg = _config(args)
    out = _out_dir(args)
    if args.n is not None:
        sigma = 2 * args.n
    else:
        sigma = args.sigma
    if sigma < 1:
        raise DomainError("sigma must be >= 1")
    bs = _splitter(args)
    N = np.arange(sigma + 1)

    if args.n is not None:
        if args.modes != 1:
            raise DomainError("--n describes a single Fock pair; use --sigma for several modes")
        ideal = bs_output_probabilities(args.n, 0.5)
        point = PhotonDistribution.point(args.n)
        jd = joint_distribution(point, bs, args.eta, max_total=sigma)
    else:
        ideal = conditional_multimode_distribution(sigma, args.modes, args.gain).weights
        total_gain = math.asinh(math.sqrt(args.modes) * math.sinh(args.gain))
        spec = TwinBeamSpec(total_gain, tuple([1.0] * args.modes))
        jd = multimode_joint_distribution(spec, bs, args.eta, max_total=sigma)
    lossy = np.array([jd[n, sigma - n] for n in N])

    def norm(w):
        s = math.fsum(w)
        return w / s if s > 0 else w

    p_ideal, p_lossy = norm(np.asarray(ideal, float)), norm(lossy)
    delta = (2.0 * N - sigma) / sigma
    rows = [(int(n), float(d), float(a), float(b)) for n, d, a, b in zip(N, delta, p_ideal, p_lossy)]
    io.write_rows(out / "fock_distribution.csv", ["N", "delta", "p_ideal", "p_lossy"], rows, cfg)
    summary = {
        "config": cfg,
        "sigma": sigma,
        "ideal": {"argmax": int(np.argmax(p_ideal)), "odd_mass": float(p_ideal[1::2].sum())},
        "lossy": {"argmax": int(np.argmax(p_lossy)), "odd_mass": float(p_lossy[1::2].sum()),
                  "slice_probability": float(math.fsum(lossy))},
    }
    io.write_json(out / "fock_summary.json", summary)
    if args.plot_data:
        io.write_plot_data(out / "fock_plot.csv",
                           {"ideal": (delta, p_ideal), "lossy": (delta, p_lossy)}, cfg)
    return 0


# ---------------------------------------------------------------------------
# twinbeam
# ---------------------------------------------------------------------------

def _weights(args):
    if args.mode_weights:
        return tuple(args.mode_weights)
    return mode_profile(args.modes)


def run_twinbeam(args):
    cfg = _config(args)
    out = _out_dir(args)
    spec = TwinBeamSpec(args.gain, _weights(args), args.eta_signal_pre, args.eta_idler_pre)
    bs = _splitter(args)
    path = args.path
    if path == "auto":
        path = "exact" if choose_count_model(spec, args.eta) == "fock" and spec.n_modes <= 4 \
            and args.electronic_noise == 0 else "sampled"
    summary = {"config": cfg, "path": path,
               "effective_modes": effective_mode_count(spec.mode_weights)}
    if path == "exact":
        jd = multimode_joint_distribution(spec, bs, args.eta, args.epsilon)
        io.write_joint_csv(out / "twinbeam_joint.csv", jd, cfg)
        hist = delta_histogram(jd, args.bins, args.min_total)
        summary.update(jd.moments())
        summary["truncation_tail"] = jd.truncation_tail
        summary["noise_reduction_factor"] = noise_reduction_factor(jd)
    else:
        batch = gaussian_sample_bsv(spec, bs, args.eta, args.trials, args.seed,
                                    args.electronic_noise, args.count_model, args.threads)
        io.write_batch(out / "twinbeam_samples.csv", batch, cfg)
        hist = delta_histogram(batch, args.bins, args.min_total)
        m1, m2 = batch.m1.astype(float), batch.m2.astype(float)
        summary.update({"count_model": batch.scenario["count_model"], "trials": batch.trials,
                        "mean_m1": float(m1.mean()), "mean_m2": float(m2.mean()),
                        "noise_reduction_factor": noise_reduction_factor(batch),
                        "g2_cross": g2_cross(batch)})
    io.write_histogram_csv(out / "twinbeam_delta.csv", hist, cfg)
    summary["excluded_mass"] = hist.excluded_mass
    io.write_json(out / "twinbeam_summary.json", summary)
    if args.plot_data:
        io.write_plot_data(out / "twinbeam_plot.csv", {"delta": _histogram_series(hist)}, cfg)
    return 0


# ---------------------------------------------------------------------------
# classical
# ---------------------------------------------------------------------------

def run_classical(args):
    cfg = _config(args)
    out = _out_dir(args)
    src = ClassicalSourceSpec(args.kind, args.mean_photons, args.phase_mode, args.phase,
                              args.visibility, args.modes)
    batch = classical_interference_samples(src, args.eta, args.trials, args.seed, args.threads)
    io.write_batch(out / "classical_samples.csv", batch, cfg)
    hist = delta_histogram(batch, args.bins, args.min_total)
    io.write_histogram_csv(out / "classical_delta.csv", hist, cfg)
    total = batch.pairs.sum(axis=1).astype(float)
    summary = {"config": cfg, "trials": batch.trials, "mean_total": float(total.mean()),
               "excluded_mass": hist.excluded_mass}
    if args.phase_mode == "uniform" and args.visibility > 0:
        summary["ks_distance_arcsine"] = arcsine_ks_distance(
            delta_values(batch, args.min_total), args.visibility)
    io.write_json(out / "classical_summary.json", summary)
    if args.plot_data:
        io.write_plot_data(out / "classical_plot.csv", {"delta": _histogram_series(hist)}, cfg)
    return 0


# ---------------------------------------------------------------------------
# filter
# ---------------------------------------------------------------------------

def run_filter(args):
    cfg = _config(args)
    out = _out_dir(args)
    if args.gamma:
        amps = MacroAmplitudes.from_entries(io.read_gamma_csv(args.gamma))
    else:
        amps = MacroAmplitudes.normalized(gamma_family(args.family, args.size, args.param))
    bs = _splitter(args)
    phi = macro_joint_distribution(amps, bs, args.eta)
    perp = macro_joint_distribution(amps.flipped(), bs, args.eta)
    rows = []
    for th in args.thresholds:
        ca, pa = filter_condition(phi, th)
        cb, pb = filter_condition(perp, th)
        empty = pa == 0.0 or pb == 0.0
        rows.append({"threshold": th, "pass_phi": pa, "pass_phiperp": pb,
                     "overlap": None if empty else effective_overlap(ca, cb),
                     "total_variation": None if empty else total_variation(ca, cb),
                     "empty": empty})
        if args.plot_data and not empty:
            io.write_joint_csv(out / f"filter_phi_t{th}.csv", ca, cfg)
    io.write_json(out / "filter_summary.json", {"config": cfg, "thresholds": rows})
    return 0


# ---------------------------------------------------------------------------
# fit-gain
# ---------------------------------------------------------------------------

def run_fit_gain(args):
    cfg = _config(args)
    out = _out_dir(args)
    points = io.read_power_csv(args.csv)
    fit = fit_gain(points)
    result = {"config": cfg, "fit": fit.to_dict(),
              "points": [{"power_mW": p, "photons": n,
                          "model": fit.N0 * math.sinh(fit.gain(p)) ** 2} for p, n in points]}
    io.write_json(out / "fit_gain.json", result)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(p, sampling=False):
    p.add_argument("--out-dir", default=None, help=f"output directory (default ${OUTPUT_ENV} or .)")
    p.add_argument("--plot-data", action="store_true", help="also write long-format plot CSV")
    if sampling:
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--trials", type=int, default=100_000)
        p.add_argument("--bins", type=int, default=64)
        p.add_argument("--min-total", type=int, default=1)


def _splitter_args(p, tau=0.5):
    p.add_argument("--tau", type=float, default=tau)
    p.add_argument("--phi-tau", type=float, default=0.0)
    p.add_argument("--phi-rho", type=float, default=0.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="bsvsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fock", help="P(N|sigma) tables, ideal and lossy")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--sigma", type=int, default=100, help="total detected photons")
    g.add_argument("--n", type=int, default=None, help="Fock state |n,n> at the inputs")
    p.add_argument("--modes", type=int, default=1)
    p.add_argument("--gain", type=float, default=3.0, help="per-mode gain for the twin-beam weights")
    p.add_argument("--eta", type=float, default=1.0)
    _splitter_args(p)
    _common(p)
    p.set_defaults(func=run_fock)

    p = sub.add_parser("twinbeam", help="twin beams on a splitter: samples and Delta histogram")
    p.add_argument("--gain", type=float, required=True)
    m = p.add_mutually_exclusive_group()
    m.add_argument("--modes", type=float, default=1.0, help="effective mode count")
    m.add_argument("--mode-weights", type=float, nargs="+", default=None)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--eta-signal-pre", type=float, default=1.0)
    p.add_argument("--eta-idler-pre", type=float, default=1.0)
    p.add_argument("--electronic-noise", type=float, default=0.0)
    p.add_argument("--count-model", choices=["auto", "fock", "wigner"], default="auto")
    p.add_argument("--path", choices=["auto", "exact", "sampled"], default="auto")
    p.add_argument("--epsilon", type=float, default=1e-10)
    _splitter_args(p)
    _common(p, sampling=True)
    p.set_defaults(func=run_twinbeam)

    p = sub.add_parser("classical", help="phase-randomised classical beams")
    p.add_argument("--kind", choices=["thermal", "coherent"], default="coherent")
    p.add_argument("--phase-mode", choices=["fixed", "uniform"], default="uniform")
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--mean-photons", type=float, default=1e6)
    p.add_argument("--visibility", type=float, default=1.0)
    p.add_argument("--modes", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=1.0)
    _common(p, sampling=True)
    p.set_defaults(func=run_classical)

    p = sub.add_parser("filter", help="photon-number-difference filter on Phi / PhiPerp")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--gamma", default=None, help="CSV with columns i,j,re,im")
    src.add_argument("--family", choices=["band", "geometric", "diagonal"], default="geometric")
    p.add_argument("--size", type=int, default=6)
    p.add_argument("--param", type=float, default=0.6)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--thresholds", type=int, nargs="+", default=[0, 1, 2, 4, 6, 8])
    _splitter_args(p)
    _common(p)
    p.set_defaults(func=run_filter)

    p = sub.add_parser("fit-gain", help="fit N = N0 sinh^2(kappa sqrt(P))")
    p.add_argument("csv", help="CSV with columns power_mW,photons")
    _common(p)
    p.set_defaults(func=run_fit_gain)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"bsvsim: error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"bsvsim: resource limit: {exc}", file=sys.stderr)
        return 3
    except FitError as exc:
        print(f"bsvsim: fit failed: {exc} {getattr(exc, 'diagnostics', {})}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
