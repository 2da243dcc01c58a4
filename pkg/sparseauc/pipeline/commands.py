"""
Comandos da linha de comando: train, eval, predict, tune, bench

Cada cmd_* recebe o argparse.Namespace já validado e retorna o código de
saída. Resultados vão para stdout; diagnósticos vão para o logger (stderr).
Exceções sobem para main.py, que as converte em códigos de saída.
"""

import logging
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd

from sparseauc.config import get_config, print_current_config
from sparseauc.data_collection.dataset import (
    apply_feature_scale,
    file_checksum,
    fit_feature_scale,
    load_dataset,
)
from sparseauc.data_collection.splits import SplitPlan, stratified_folds
from sparseauc.model_training.greedy import EarlyStopConfig, GreedyConfig, grow
from sparseauc.model_training.kernel import KernelSpec
from sparseauc.model_training.tron import TronConfig
from sparseauc.pipeline.evaluation import GridSpec, decision_function, grid_search, write_grid_csv
from sparseauc.pipeline.metrics import auc_from_labels
from sparseauc.pipeline.model_io import RunManifest, load_model, save_model
from sparseauc.utils.files import atomic_write

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ['basis_count', 'objective', 'train_auc', 'val_auc', 'elapsed_sec']
BENCH_COLUMNS = ['threads', 'median_wall_sec', 'speedup_vs_1']


@dataclass
class TrainOptions:
    """Tudo o que influencia o modelo treinado (threads não influencia)"""
    train_path: str
    val_path: str = None
    val_fraction: float = None
    kernel: str = 'gaussian'
    sigma: float = 1.0
    C: float = 1.0
    greedy: dict = field(default_factory=dict)
    tron: dict = field(default_factory=dict)
    tie_credit: float = 0.0
    positive_classes: list = None
    remap: bool = False
    scale_features: bool = False

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def kernel_spec(self):
        return KernelSpec(kind=self.kernel, sigma=self.sigma)

    def greedy_config(self):
        values = dict(self.greedy)
        early = EarlyStopConfig(**values.pop('early_stop', {}))
        return GreedyConfig(early_stop=early, **values)

    def tron_config(self):
        return TronConfig(**self.tron)


@dataclass
class TrainRun:
    result: object
    manifest: RunManifest
    train: object
    val: object = None


def _check_inputs(*paths):
    for path in paths:
        if path is not None and not os.path.exists(path):
            raise FileNotFoundError(f"arquivo não encontrado: {path}")


def _positive_classes(values):
    return None if not values else [float(v) for v in values]


def options_from_args(args):
    model_cfg = get_config('model')
    eval_cfg = get_config('eval')
    early = EarlyStopConfig.from_config(
        enabled=False if args.no_early_stop else None,
        patience=args.patience,
        min_delta=args.min_delta,
    )
    greedy = GreedyConfig.from_config(
        early_stop=early,
        d_max=args.dmax,
        kappa=args.kappa,
        method=args.method,
        retrain_schedule=args.schedule,
        retrain_ratio=args.ratio,
        warm_start=args.warm_start,
        seed=args.seed,
    )
    tron = TronConfig.from_config(grad_tol=args.grad_tol, max_newton_iters=args.max_newton_iters)
    spec = KernelSpec.from_config(kind=args.kernel, sigma=args.sigma)
    return TrainOptions(
        train_path=args.train,
        val_path=getattr(args, 'val_path', None),
        val_fraction=getattr(args, 'val_frac', None),
        kernel=spec.kind,
        sigma=spec.sigma,
        C=float(args.C if args.C is not None else model_cfg['C']),
        greedy=asdict(greedy),
        tron=tron.to_dict(),
        tie_credit=float(args.tie_credit if args.tie_credit is not None else eval_cfg['tie_credit']),
        positive_classes=_positive_classes(args.positive_class),
        remap=bool(args.remap),
        scale_features=bool(args.scale or model_cfg['scale_features']),
    )


def train_model(options, threads=1):
    """
    Carrega os dados, separa validação, escala e cresce o modelo

    Returns:
        TrainRun (o modelo está em run.result.model)
    """
    _check_inputs(options.train_path, options.val_path)
    greedy_cfg = options.greedy_config()
    ds = load_dataset(options.train_path, options.positive_classes, options.remap)

    val = None
    if options.val_path:
        val = load_dataset(options.val_path, options.positive_classes, options.remap)
    elif options.val_fraction:
        plan = SplitPlan(mode='holdout-fraction', val_fraction=options.val_fraction, seed=greedy_cfg.seed)
        train_idx, val_idx = stratified_folds(ds, plan)[0]
        ds, val = ds.subset(train_idx), ds.subset(val_idx)

    scale = None
    if options.scale_features:
        scale = fit_feature_scale(ds)
        ds = apply_feature_scale(ds, scale)
        if val is not None:
            val = apply_feature_scale(val, scale)

    result = grow(ds, options.kernel_spec(), options.C, greedy_cfg, val=val,
                  tron_cfg=options.tron_config(), threads=threads, tie_credit=options.tie_credit)
    result.model.feature_scale = scale

    manifest = RunManifest(
        options=options.to_dict(),
        train_checksum=file_checksum(options.train_path),
        val_checksum=file_checksum(options.val_path) if options.val_path else '',
        stop_reason=result.stop_reason,
        basis_count=result.model.size,
    )
    return TrainRun(result, manifest, ds, val)


def write_trace_csv(trace, path):
    frame = pd.DataFrame([asdict(record) for record in trace], columns=TRACE_COLUMNS)
    with atomic_write(path) as handle:
        frame.to_csv(handle, index=False)


def cmd_train(args):
    if args.from_model:
        _check_inputs(args.from_model)
        _, previous = load_model(args.from_model)
        options = TrainOptions.from_dict(previous.options)
        if args.train:
            options.train_path = args.train
        _check_inputs(options.train_path, options.val_path)
        if file_checksum(options.train_path) != previous.train_checksum:
            logger.warning("checksum de %s difere do registrado no manifesto", options.train_path)
        print(f"♻️  Retreinando a partir do manifesto de {args.from_model}")
    else:
        if not args.train:
            raise ValueError("informe o arquivo de treino (ou --from-model)")
        options = options_from_args(args)

    print(f"📡 Carregando {options.train_path}...")
    run = train_model(options, threads=args.threads)
    model = run.result.model

    save_model(model, run.manifest, args.model_out)
    if args.trace_out:
        write_trace_csv(run.result.trace, args.trace_out)

    print(f"🔧 Kernel: {options.kernel} (sigma={options.sigma:g}), C={options.C:g}")
    print(f"📊 Funções base: {model.size} (parada: {run.result.stop_reason})")
    if run.result.trace:
        last = run.result.trace[-1]
        print(f"📈 AUC de treino: {last.train_auc:.6f}")
        if run.val is not None:
            print(f"📈 AUC de validação: {last.val_auc:.6f}")
        print(f"🎯 Objetivo final: {last.objective:.10g}")
    if run.result.line_search_failed:
        print("⚠️  A busca linear falhou em algum retreino; veja os avisos")
    print(f"💾 Modelo salvo em {args.model_out}")
    return 0


def _load_eval_data(path, manifest, require_both=True):
    options = manifest.options
    return load_dataset(path, _positive_classes(options.get('positive_classes')),
                        options.get('remap', False), require_both=require_both)


def cmd_eval(args):
    _check_inputs(args.model, args.test)
    model, manifest = load_model(args.model)
    ds = _load_eval_data(args.test, manifest)
    tie_credit = args.tie_credit if args.tie_credit is not None else manifest.options.get('tie_credit', 0.0)

    scores = decision_function(model, ds.X, threads=args.threads)
    value = auc_from_labels(scores, ds.y, tie_credit)
    print(f"📈 AUC: {value:.6f}")
    print(f"📊 Funções base: {model.size}")
    return 0


def cmd_predict(args):
    _check_inputs(args.model, args.data)
    model, manifest = load_model(args.model)
    ds = _load_eval_data(args.data, manifest, require_both=False)
    scores = decision_function(model, ds.X, threads=args.threads)

    frame = pd.DataFrame({'index': np.arange(ds.l), 'label': ds.y.astype(int), 'score': scores})
    if args.out:
        with atomic_write(args.out) as handle:
            frame.to_csv(handle, index=False, float_format='%.17g')
        print(f"💾 {ds.l} scores salvos em {args.out}")
    else:
        print(frame.to_csv(index=False, float_format='%.17g'), end='')
    return 0


def cmd_tune(args):
    _check_inputs(args.train)
    options = options_from_args(args)
    ds = load_dataset(options.train_path, options.positive_classes, options.remap)
    if options.scale_features:
        ds = apply_feature_scale(ds, fit_feature_scale(ds))

    grid = GridSpec.from_config(args.C_values, args.sigma_values)
    plan = SplitPlan.from_config(fold_count=args.folds, runs=args.runs, seed=args.seed,
                                 mode=args.split_mode, val_fraction=args.split_val_frac)
    print(f"🔍 Grade: {len(grid.C_values)} x {len(grid.sigma_values)}, {plan.runs} repetições de {plan.mode}")

    result = grid_search(ds, grid, plan, options.greedy_config(), options.tron_config(),
                         kind=options.kernel, threads=args.threads, tie_credit=options.tie_credit)
    if args.grid_out:
        write_grid_csv(result, args.grid_out)
        print(f"💾 Grade salva em {args.grid_out}")

    best = next(cell for cell in result.cells if cell.C == result.best_C and cell.sigma == result.best_sigma)
    print(f"🏆 Melhor: C={result.best_C:g}, sigma={result.best_sigma:g}")
    print(f"📈 AUC: {best.mean_auc:.4f} ± {best.std_auc:.4f} ({best.mean_basis_count:.1f} funções base)")
    return 0


def _time_training(ds, options, threads):
    greedy_cfg = options.greedy_config()
    started = time.perf_counter()
    result = grow(ds, options.kernel_spec(), options.C, greedy_cfg, tron_cfg=options.tron_config(),
                  threads=threads, tie_credit=options.tie_credit)
    return time.perf_counter() - started, result.model


def cmd_bench(args):
    _check_inputs(args.train)
    bench_cfg = get_config('bench')
    if args.dmax is None:
        args.dmax = bench_cfg['d_max']
    options = options_from_args(args)
    threads_list = args.threads_list or bench_cfg['threads_list']
    repeats = args.repeats or bench_cfg['repeats']

    ds = load_dataset(options.train_path, options.positive_classes, options.remap)
    if options.scale_features:
        ds = apply_feature_scale(ds, fit_feature_scale(ds))
    options.greedy['d_max'] = min(int(options.greedy['d_max']), ds.l)
    if ds.l < bench_cfg['min_recommended_rows']:
        logger.warning("apenas %d exemplos; recomendado >= %d para medir ganho de threads",
                       ds.l, bench_cfg['min_recommended_rows'])

    rows = []
    reference = None
    for threads in threads_list:
        times = []
        for _ in range(repeats):
            elapsed, model = _time_training(ds, options, threads)
            times.append(elapsed)
            if reference is None:
                reference = model
            elif not (np.array_equal(model.basis_index, reference.basis_index)
                      and np.array_equal(model.beta, reference.beta)):
                logger.warning("modelo com %d threads difere do modelo de referência", threads)
        rows.append({'threads': threads, 'median_wall_sec': float(np.median(times))})
        print(f"⏱️  {threads} thread(s): {rows[-1]['median_wall_sec']:.3f} s (mediana de {repeats})")

    # referência: a execução com 1 thread, ou a primeira da lista
    baseline = next((row['median_wall_sec'] for row in rows if row['threads'] == 1), rows[0]['median_wall_sec'])
    for row in rows:
        row['speedup_vs_1'] = baseline / row['median_wall_sec'] if row['threads'] != 1 else 1.0

    frame = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    if args.bench_out:
        with atomic_write(args.bench_out) as handle:
            frame.to_csv(handle, index=False)
        print(f"💾 Benchmark salvo em {args.bench_out}")
    else:
        print(frame.to_csv(index=False), end='')
    return 0


def cmd_config(args):
    print_current_config()
    return 0
