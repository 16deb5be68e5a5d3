"""Batch entry points: benchmarks, complexity verification, training, data.

Four subcommands share one report shape:

- ``gen-dataset`` writes a synthetic vertically-split CSV plus ground truth.
- ``bench-matmult`` runs each requested method/size on random integer-valued
  matrices and records op counts, modeled cost, wall time, and oracle error.
- ``verify-complexity`` sweeps a power-of-two grid and checks measured counts
  and transcript audits against the closed-form predictions, exiting nonzero
  on any mismatch.
- ``train`` runs a protocol end to end against a centralized cleartext
  reference on identical batches and asserts the parity tolerances.

Reports are deterministic for a fixed seed: rows are emitted in case order
with fixed float formatting, so two runs differ only in wall_time fields.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import matmult as mm
from .counters import MeasurementScope, measure
from .data import gen_synthetic, load_dataset
from .errors import (
    CapacityExceeded,
    ConfigInvalid,
    HevflError,
    LayoutUnsupported,
    MatrixTooLarge,
    OperandTooLarge,
    VectorTooLong,
)
from .fixedpoint import from_fixed
from .metrics import auc, bce, mse
from .netsim import Network
from .params import PRESETS, CostModel, cost_model_for, preset, semantic_params
from .protocols.caesar import caesar_init_states, caesar_train_iteration
from .protocols.common import IdealDealer, PartyState, SigmoidPoly, TrainingConfig
from .protocols.linr import ARBITER, vfl_linr_iteration
from .protocols.nn import nn_init_states, vfl_nn_train_iteration
from .rlwe.backend import RlweBackend
from .simd import SemanticBackend, SimdBackend

MICROSECONDS_PER_COST_UNIT = 1e-6
"""Modeled seconds per abstract op-cost unit (cost model units are ~1 mult)."""

BENCH_COLUMNS = [
    "method", "m", "n", "slots", "add", "mult", "rot", "hst",
    "bytes_in", "bytes_out", "modeled_time", "wall_time", "max_abs_error",
]

TRAIN_COLUMNS = [
    "epoch", "loss_fed", "loss_central", "loss_diff", "auc_fed", "auc_central",
    "bytes_total", "add", "mult", "rot", "hst", "wall_time",
]

_SKIPPABLE = (MatrixTooLarge, LayoutUnsupported, VectorTooLong,
              CapacityExceeded, OperandTooLarge)


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


@dataclass
class Report:
    """Ordered rows with a fixed column set; CSV and record formats."""

    columns: list[str]
    rows: list[dict] = field(default_factory=list)

    def add(self, **fields) -> None:
        missing = [c for c in self.columns if c not in fields]
        if missing:
            raise ConfigInvalid(f"report row missing columns {missing}")
        self.rows.append(fields)

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_fmt(row[c]) for c in self.columns))
        return "\n".join(lines) + "\n"

    def to_records(self) -> str:
        lines = []
        for row in self.rows:
            parts = [f"{c}={_fmt(row[c])}" for c in self.columns]
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    def write(self, out: str | None) -> None:
        if out is None:
            sys.stdout.write(self.to_csv())
            return
        path = Path(out)
        text = self.to_records() if path.suffix == ".txt" else self.to_csv()
        path.write_text(text)


# ---------------------------------------------------------------------------
# one benchmark case
# ---------------------------------------------------------------------------

@dataclass
class CaseOutcome:
    method: str
    m: int
    n: int
    slots: int
    ops: object
    prediction: mm.ComplexityPrediction
    bytes_in: int
    bytes_out: int
    modeled_seconds: float
    wall_seconds: float
    max_abs_error: float
    failures: list[str] = field(default_factory=list)


def run_matmult_case(
    backend: SimdBackend,
    method: str,
    x: np.ndarray,
    y: np.ndarray,
    key_id: int,
    cost: CostModel,
    *,
    predictor=mm.predict_complexity,
) -> CaseOutcome:
    """One X @ [[y]] exchange over the simulated network, fully audited.

    B sends the encrypted vector, A (matrix owner) computes and returns the
    result ciphertexts, B finalizes. The transcript audit and the measured
    op counts are both compared against `predictor`'s closed forms; any
    discrepancy, and any nonzero oracle error, lands in `failures`.
    """
    params = backend.params
    t = params.plain_modulus
    m, n = x.shape
    start = time.perf_counter()
    pred = predictor(method, m, n, params.slot_count)

    with Network(cost) as net:
        enc = mm.encode_for_method(method, x, params)
        cts = mm.encrypt_vector(backend, y, method, key_id)
        n_in = len(cts) if isinstance(cts, list) else 1
        net.send("B", "A", pred.ct_b_to_a[1], cts, count=n_in)

        payload = net.recv("A", "B").payload
        with MeasurementScope() as scope:
            out = mm.matmult(method, enc, payload, backend)
        ops = measure(scope)[0]

        if isinstance(out, mm.PendingResult):
            net.send("A", "B", "rlwe_ct", (out.ciphertexts, out.reduction_plan),
                     count=len(out.ciphertexts))
            cts_back, plan = net.recv("B", "A").payload
            decrypted = [backend.decrypt(c).slots for c in cts_back]
            residues = mm.finalize_lazy_ras(decrypted, plan, modulus=t)[:m]
        elif isinstance(out, list):
            net.send("A", "B", "lwe_ct_batch", out, count=len(out))
            residues = np.array(
                [backend.decrypt_lwe(c) for c in net.recv("B", "A").payload]
            )
        else:
            net.send("A", "B", "rlwe_ct", out, count=1)
            residues = backend.decrypt(net.recv("B", "A").payload).slots[:m]

        report = net.audit(pred, src="B", dst="A")
        stats = net.stats
        modeled_comm = net.modeled_seconds

    got = from_fixed(np.asarray(residues), params.scale, t, scale_exponent=2)
    err = float(np.max(np.abs(got - x @ y))) if m else 0.0

    failures = list(report.mismatches)
    measured = (ops.add, ops.mult, ops.rot, ops.hst_rot)
    expected = (pred.add, pred.mult, pred.rot, pred.hst_rot)
    if measured != expected:
        for name, got_n, want_n in zip(("add", "mult", "rot", "hst"), measured, expected):
            if got_n != want_n:
                failures.append(f"{name}: measured {got_n} != predicted {want_n}")
    op_cost = (cost.cost_add * ops.add + cost.cost_mult * ops.mult +
               cost.cost_rot * ops.rot + cost.cost_hst_rot * ops.hst_rot)
    return CaseOutcome(
        method=method, m=m, n=n, slots=params.slot_count,
        ops=ops, prediction=pred,
        bytes_in=stats.bytes_by_direction.get(("B", "A"), 0),
        bytes_out=stats.bytes_by_direction.get(("A", "B"), 0),
        modeled_seconds=modeled_comm + op_cost * MICROSECONDS_PER_COST_UNIT,
        wall_seconds=time.perf_counter() - start,
        max_abs_error=err,
        failures=failures,
    )


def _make_backend(name: str, preset_name: str, slots: int) -> SimdBackend:
    if name == "rlwe":
        return RlweBackend(preset(preset_name))
    return SemanticBackend(semantic_params(slots))


def _case_key(backend: SimdBackend, method: str, m: int, n: int) -> int:
    if isinstance(backend, RlweBackend):
        offsets = mm.required_rot_offsets(method, m, n, backend.params.slot_count)
        return backend.keygen(offsets)
    return backend.keygen()


def _bench_one(args, method: str, m: int, n: int, slots: int, idx: int,
               predictor) -> CaseOutcome | None:
    backend = _make_backend(args.backend, args.preset, slots)
    cost = cost_model_for(backend.params)
    rng = np.random.default_rng([args.seed, idx])
    x = rng.integers(-8, 9, size=(m, n)).astype(np.float64)
    y = rng.integers(-8, 9, size=n).astype(np.float64)
    try:
        key = _case_key(backend, method, m, n)
        return run_matmult_case(backend, method, x, y, key, cost,
                                predictor=predictor)
    except _SKIPPABLE:
        return None


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_bench_matmult(args, predictor=mm.predict_complexity) -> int:
    if not args.method:
        raise ConfigInvalid("at least one --method is required")
    for meth in args.method:
        if meth not in mm.METHODS:
            raise ConfigInvalid(f"unknown method {meth!r}; have {sorted(mm.METHODS)}")
    slot_list = _slots_for(args)
    cases = [(meth, m, n, s)
             for meth in args.method for m in args.m for n in args.n
             for s in slot_list]
    if not cases:
        raise ConfigInvalid("empty size grid; pass --m and --n")

    with ThreadPoolExecutor(max_workers=min(8, len(cases))) as pool:
        outcomes = list(pool.map(
            lambda ic: _bench_one(args, *ic[1], ic[0], predictor),
            enumerate(cases),
        ))

    report = Report(BENCH_COLUMNS)
    bad: list[str] = []
    for (meth, m, n, s), case in zip(cases, outcomes):
        if case is None:
            continue
        report.add(
            method=case.method, m=case.m, n=case.n, slots=case.slots,
            add=case.ops.add, mult=case.ops.mult, rot=case.ops.rot,
            hst=case.ops.hst_rot, bytes_in=case.bytes_in,
            bytes_out=case.bytes_out, modeled_time=case.modeled_seconds,
            wall_time=case.wall_seconds, max_abs_error=case.max_abs_error,
        )
        label = f"{meth} {m}x{n} N'={s}"
        bad.extend(f"{label}: {msg}" for msg in case.failures)
        if args.backend == "semantic" and case.max_abs_error > 0:
            bad.append(f"{label}: oracle error {case.max_abs_error} in exact regime")
    report.write(args.out)
    for line in bad:
        print(f"FAIL {line}", file=sys.stderr)
    return 1 if bad else 0


def cmd_verify_complexity(args, predictor=mm.predict_complexity) -> int:
    methods = args.method or sorted(mm.METHODS)
    sizes = args.m or [2, 4, 8, 16, 32, 64]
    sizes_n = args.n or sizes
    slot_list = (_slots_for(args) if args.backend == "rlwe"
                 else args.slots or [8, 64, 512])
    cases = [(meth, m, n, s)
             for meth in methods for m in sizes for n in sizes_n
             for s in slot_list]

    with ThreadPoolExecutor(max_workers=8) as pool:
        outcomes = list(pool.map(
            lambda ic: _bench_one(args, *ic[1], ic[0], predictor),
            enumerate(cases),
        ))

    failed = 0
    ran = 0
    for (meth, m, n, s), case in zip(cases, outcomes):
        label = f"{meth:8s} m={m:<3d} n={n:<3d} N'={s:<4d}"
        if case is None:
            print(f"{label} SKIP (layout infeasible)")
            continue
        ran += 1
        if case.failures:
            failed += 1
            print(f"{label} FAIL")
            for msg in case.failures:
                print(f"    {msg}")
        else:
            print(f"{label} PASS")
    print(f"{ran} cases run, {failed} failed")
    return 1 if failed else 0


def _slots_for(args) -> list[int]:
    if args.backend == "rlwe":
        fixed = preset(args.preset).slot_count
        if args.slots and any(s != fixed for s in args.slots):
            raise ConfigInvalid(
                f"--slots must match the rlwe preset slot count {fixed}"
            )
        return [fixed]
    return args.slots or [64]


def _pow2_at_least(x: int) -> int:
    return 1 << max(3, int(x - 1).bit_length())


def _batches(rows: int, batch: int, epochs: int, seed: int) -> list[list[np.ndarray]]:
    """Identical schedule for the protocol and its centralized mirror."""
    rng = np.random.default_rng([seed, 0xBA7C4])
    per_epoch = []
    for _ in range(epochs):
        order = rng.permutation(rows)
        per_epoch.append([order[i:i + batch]
                          for i in range(0, rows - batch + 1, batch)])
    return per_epoch


def cmd_train(args) -> int:
    ids, x_a, x_b, y = load_dataset(args.data)
    rows, n_a = x_a.shape
    n_b = x_b.shape[1]
    batch = min(args.batch, rows)
    slots = (args.slots or [0])[0] or max(
        _pow2_at_least(batch), _pow2_at_least(max(n_a, n_b)), 8
    )
    backend = _make_backend(args.backend, args.preset, slots)
    schedule = _batches(rows, batch, args.epochs, args.seed)

    if args.protocol == "linr":
        rows_out, code = _train_linr(args, backend, x_a, x_b, y, schedule)
    elif args.protocol == "caesar":
        rows_out, code = _train_caesar(args, backend, x_a, x_b, y, schedule)
    else:
        rows_out, code = _train_nn(args, backend, x_a, x_b, y, schedule)

    report = Report(TRAIN_COLUMNS, rows_out)
    report.write(args.out)
    return code


def _epoch_row(epoch, loss_fed, loss_central, auc_fed, auc_central,
               comm_bytes, ops, wall) -> dict:
    return dict(
        epoch=epoch, loss_fed=loss_fed, loss_central=loss_central,
        loss_diff=abs(loss_fed - loss_central),
        auc_fed=auc_fed, auc_central=auc_central, bytes_total=comm_bytes,
        add=ops[0], mult=ops[1], rot=ops[2], hst=ops[3], wall_time=wall,
    )


def _accumulate(totals, stats) -> None:
    for op in stats.ops.values():
        totals[0] += op.add
        totals[1] += op.mult
        totals[2] += op.rot
        totals[3] += op.hst_rot
    if stats.comm is not None:
        totals[4] += stats.comm.total_bytes


def _train_linr(args, backend, x_a, x_b, y, schedule):
    """Squared-loss SGD, weights in the clear at each party, arbiter key."""
    if isinstance(backend, RlweBackend):
        offsets = set()
        for n_feat in (x_a.shape[1], x_b.shape[1]):
            offsets |= mm.required_rot_offsets(
                "hoisted", n_feat, args.batch, backend.params.slot_count)
        key_c = backend.keygen(offsets)
    else:
        key_c = backend.keygen()
    state_a = PartyState(role="A", rng=np.random.default_rng(args.seed + 1),
                         features=x_a, weights=np.zeros(x_a.shape[1]))
    state_b = PartyState(role="B", rng=np.random.default_rng(args.seed + 2),
                         features=x_b, labels=y, weights=np.zeros(x_b.shape[1]))
    arbiter = PartyState(role=ARBITER, rng=np.random.default_rng(args.seed + 3),
                         key_id=key_c)
    w_ref = np.zeros(x_a.shape[1] + x_b.shape[1])
    x_full = np.hstack([x_a, x_b])

    def fed_loss():
        return 0.5 * mse(x_a @ state_a.weights + x_b @ state_b.weights, y)

    def central_loss():
        return 0.5 * mse(x_full @ w_ref, y)

    rows_out = [_epoch_row(0, fed_loss(), central_loss(), "", "", 0, (0, 0, 0, 0), 0.0)]
    failures = []
    for epoch, batches in enumerate(schedule, start=1):
        totals = [0, 0, 0, 0, 0]
        start = time.perf_counter()
        with Network(cost_model_for(backend.params),
                     parties=("A", "B", ARBITER)) as net:
            for batch in batches:
                stats = vfl_linr_iteration(
                    backend, state_a, state_b, arbiter, batch, net, lr=args.lr
                )
                _accumulate(totals, stats)
                resid = x_full[batch] @ w_ref - y[batch]
                w_ref -= args.lr * (x_full[batch].T @ resid) / len(batch)
        lf, lc = fed_loss(), central_loss()
        rows_out.append(_epoch_row(epoch, lf, lc, "", "", totals[4],
                                   tuple(totals[:4]), time.perf_counter() - start))
        if abs(lf - lc) > 1e-3:
            failures.append(f"epoch {epoch}: |{lf} - {lc}| > 1e-3")
    for line in failures:
        print(f"FAIL linr parity {line}", file=sys.stderr)
    return rows_out, 1 if failures else 0


def _train_caesar(args, backend, x_a, x_b, y, schedule):
    """Secret-shared logistic regression with the cubic sigmoid surrogate."""
    n_a, n_b = x_a.shape[1], x_b.shape[1]
    if isinstance(backend, RlweBackend):
        offsets = set()
        for shape in ((args.batch, n_a), (n_a, args.batch),
                      (args.batch, n_b), (n_b, args.batch)):
            offsets |= mm.required_rot_offsets(
                "hoisted", shape[0], shape[1], backend.params.slot_count)
        key_a, key_b = backend.keygen(offsets), backend.keygen(offsets)
    else:
        key_a, key_b = backend.keygen(), backend.keygen()
    sigmoid = SigmoidPoly()
    cfg = TrainingConfig(
        batch_size=args.batch, n_features_a=n_a, n_features_b=n_b,
        learning_rate=args.lr, epochs=args.epochs, params=backend.params,
        sigmoid=sigmoid,
    )
    state_a, state_b = caesar_init_states(
        backend, features_a=x_a, features_b=x_b, labels=y,
        w_a=np.zeros(n_a), w_b=np.zeros(n_b),
        key_a=key_a, key_b=key_b, seed=args.seed,
    )
    dealer = IdealDealer(np.random.default_rng(args.seed + 7),
                         backend.params.plain_modulus, backend.params.scale)
    w_ref = np.zeros(n_a + n_b)
    x_full = np.hstack([x_a, x_b])
    w_fed = np.zeros(n_a + n_b)

    def logistic_loss(w):
        return bce(1.0 / (1.0 + np.exp(-(x_full @ w))), y)

    rows_out = [_epoch_row(0, logistic_loss(w_fed), logistic_loss(w_ref),
                           auc(x_full @ w_fed, y), auc(x_full @ w_ref, y),
                           0, (0, 0, 0, 0), 0.0)]
    failures = []
    for epoch, batches in enumerate(schedule, start=1):
        totals = [0, 0, 0, 0, 0]
        start = time.perf_counter()
        with Network(cost_model_for(backend.params)) as net:
            for batch in batches:
                stats = caesar_train_iteration(
                    backend, state_a, state_b, dealer, batch, net, cfg
                )
                _accumulate(totals, stats)
                z = x_full[batch] @ w_ref
                e = sigmoid(z) - y[batch]
                w_ref -= args.lr / len(batch) * (x_full[batch].T @ e)
        w_fed = np.concatenate([stats.extras["w_a"], stats.extras["w_b"]])
        lf, lc = logistic_loss(w_fed), logistic_loss(w_ref)
        af, ac = auc(x_full @ w_fed, y), auc(x_full @ w_ref, y)
        rows_out.append(_epoch_row(epoch, lf, lc, af, ac, totals[4],
                                   tuple(totals[:4]), time.perf_counter() - start))
        if abs(lf - lc) > 1e-2:
            failures.append(f"epoch {epoch}: loss |{lf} - {lc}| > 1e-2")
        if abs(af - ac) > 0.01:
            failures.append(f"epoch {epoch}: AUC |{af} - {ac}| > 0.01")
    for line in failures:
        print(f"FAIL caesar parity {line}", file=sys.stderr)
    return rows_out, 1 if failures else 0


def _train_nn(args, backend, x_a, x_b, y, schedule):
    """Split network: encrypted embedding upload, all weights held by B."""
    n_a, n_b = x_a.shape[1], x_b.shape[1]
    hidden = args.hidden
    if isinstance(backend, RlweBackend):
        m_pad = mm._pad_pow2(args.batch)
        n_pad = mm._pad_pow2(n_a)
        low = min(m_pad, n_pad)
        # Transpose conversion rotates ciphertext diagonals by delta_i.
        deltas = {(i if m_pad >= n_pad else n_pad - m_pad + i) % backend.params.slot_count
                  for i in range(1, low)}
        key_a = backend.keygen(deltas)
    else:
        key_a = backend.keygen()
    state_a, state_b = nn_init_states(
        backend, features_a=x_a, features_b=x_b, labels=y,
        hidden_units=hidden, key_a=key_a, seed=args.seed,
    )
    wa_ref = state_b.interactive_weights.copy()
    wb_ref = state_b.weights.copy()
    wt_ref = state_b.top_weights.copy()

    def forward(wa, wb, wt):
        return 1.0 / (1.0 + np.exp(-((x_a @ wa + x_b @ wb) @ wt)))

    def fed_loss():
        return bce(forward(state_b.interactive_weights, state_b.weights,
                           state_b.top_weights), y)

    rows_out = [_epoch_row(0, fed_loss(), bce(forward(wa_ref, wb_ref, wt_ref), y),
                           "", "", 0, (0, 0, 0, 0), 0.0)]
    failures = []
    for epoch, batches in enumerate(schedule, start=1):
        totals = [0, 0, 0, 0, 0]
        start = time.perf_counter()
        with Network(cost_model_for(backend.params)) as net:
            for batch in batches:
                stats = vfl_nn_train_iteration(
                    backend, state_a, state_b, batch, net, args.lr
                )
                _accumulate(totals, stats)
                u = x_a[batch] @ wa_ref + x_b[batch] @ wb_ref
                p = 1.0 / (1.0 + np.exp(-(u @ wt_ref)))
                dl = (p - y[batch]) / len(batch)
                du = np.outer(dl, wt_ref)
                wa_ref -= args.lr * (x_a[batch].T @ du)
                wb_ref -= args.lr * (x_b[batch].T @ du)
                wt_ref -= args.lr * (u.T @ dl)
        lf = fed_loss()
        lc = bce(forward(wa_ref, wb_ref, wt_ref), y)
        rows_out.append(_epoch_row(epoch, lf, lc, "", "", totals[4],
                                   tuple(totals[:4]), time.perf_counter() - start))
        if abs(lf - lc) > 1e-2:
            failures.append(f"epoch {epoch}: |{lf} - {lc}| > 1e-2")
    for line in failures:
        print(f"FAIL nn parity {line}", file=sys.stderr)
    return rows_out, 1 if failures else 0


def cmd_gen_dataset(args) -> int:
    if args.out is None:
        raise ConfigInvalid("gen-dataset requires --out")
    path = gen_synthetic(
        args.out, args.rows, args.features_a, args.features_b,
        kind=args.kind, noise=args.noise, seed=args.seed,
    )
    print(f"wrote {args.rows} rows to {path}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hevfl",
        description="Packed-HE matrix products and federated training harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--backend", choices=("semantic", "rlwe"), default="semantic")
        p.add_argument("--preset", choices=sorted(PRESETS), default="desk-1024")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="report path (.csv or .txt)")

    bench = sub.add_parser("bench-matmult", help="run methods on a size grid")
    bench.add_argument("--method", action="append", default=None)
    bench.add_argument("--m", type=int, nargs="+", default=[64])
    bench.add_argument("--n", type=int, nargs="+", default=[64])
    bench.add_argument("--slots", type=int, nargs="+", default=None)
    common(bench)
    bench.set_defaults(func=cmd_bench_matmult)

    verify = sub.add_parser("verify-complexity",
                            help="measured counts vs closed forms, full grid")
    verify.add_argument("--method", action="append", default=None)
    verify.add_argument("--m", type=int, nargs="+", default=None)
    verify.add_argument("--n", type=int, nargs="+", default=None)
    verify.add_argument("--slots", type=int, nargs="+", default=None)
    common(verify)
    verify.set_defaults(func=cmd_verify_complexity)

    train = sub.add_parser("train", help="protocol vs centralized reference")
    train.add_argument("--protocol", choices=("linr", "caesar", "nn"),
                       required=True)
    train.add_argument("--data", required=True)
    train.add_argument("--epochs", type=int, default=10)
    train.add_argument("--batch", type=int, default=64)
    train.add_argument("--lr", type=float, default=0.1)
    train.add_argument("--hidden", type=int, default=2,
                       help="hidden units (nn protocol)")
    train.add_argument("--slots", type=int, nargs="+", default=None)
    common(train)
    train.set_defaults(func=cmd_train)

    gen = sub.add_parser("gen-dataset", help="synthetic vertically-split CSV")
    gen.add_argument("--rows", type=int, default=512)
    gen.add_argument("--features-a", type=int, default=4)
    gen.add_argument("--features-b", type=int, default=4)
    gen.add_argument("--kind", choices=("linear", "logistic"), default="linear")
    gen.add_argument("--noise", type=float, default=0.05)
    common(gen)
    gen.set_defaults(func=cmd_gen_dataset)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HevflError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
