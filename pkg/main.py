#!/usr/bin/env python3
"""
SparseAUC - Classificador kernel esparso por maximização da AUC

Este programa treina um modelo f(x) = sum beta_q k(x, x_q) com poucas funções
base escolhidas de forma gulosa, otimizando uma perda quadrática sobre os pares
(positivo, negativo) com Newton truncado.

Uso:
    python main.py {train,eval,predict,tune,bench,config} [opções]
"""

import argparse
import sys

from sparseauc.errors import DatasetParseError, LabelError, ModelFormatError, SparseAUCError, SplitError
from sparseauc.utils.log import setup_logging

EXIT_ERROR = 1
EXIT_MISSING_FILE = 2
EXIT_INTERRUPTED = 130


def print_banner():
    """Imprime o banner do programa (stderr, para não misturar com resultados)"""
    print("=" * 60, file=sys.stderr)
    print("📈 SparseAUC - Classificador kernel esparso", file=sys.stderr)
    print("=" * 60, file=sys.stderr)
    print("Seleção gulosa de funções base + Newton truncado", file=sys.stderr)
    print("Maximiza a AUC sobre pares positivo/negativo", file=sys.stderr)
    print("=" * 60, file=sys.stderr)


def float_list(text):
    return [float(v) for v in text.split(',') if v.strip()]


def int_list(text):
    return [int(v) for v in text.split(',') if v.strip()]


def add_model_arguments(parser):
    """Flags que definem o modelo (compartilhadas por train, tune e bench)"""
    group = parser.add_argument_group("modelo")
    group.add_argument("--kernel", choices=["gaussian", "linear"], help="Kernel (padrão: gaussian)")
    group.add_argument("--sigma", type=float, help="Largura do kernel gaussiano")
    group.add_argument("--C", type=float, help="Peso da perda dos pares")
    group.add_argument("--dmax", type=int, help="Máximo de funções base (padrão: min(l/2, 1000))")
    group.add_argument("--kappa", type=int, help="Candidatos sorteados por passo")
    group.add_argument("--method", choices=["one-dim", "full-refit"], help="Pontuação dos candidatos")
    group.add_argument("--schedule", choices=["always", "geometric", "doubling"], help="Quando retreinar")
    group.add_argument("--ratio", type=float, help="Razão do cronograma geométrico")
    group.add_argument("--warm-start", choices=["scored", "zero"], help="Coeficiente inicial da base admitida")
    group.add_argument("--grad-tol", type=float, help="Tolerância relativa do gradiente")
    group.add_argument("--max-newton-iters", type=int, help="Iterações de Newton por retreino")
    group.add_argument("--patience", type=int, help="Admissões sem melhora antes de parar")
    group.add_argument("--min-delta", type=float, help="Melhora mínima da AUC de validação")
    group.add_argument("--no-early-stop", action="store_true", help="Desativa a parada antecipada")
    group.add_argument("--tie-credit", type=float, choices=[0.0, 0.5], help="Crédito de pares empatados na AUC")

    data = parser.add_argument_group("dados")
    data.add_argument("--positive-class", action="append", help="Rótulo tratado como +1 (repetível)")
    data.add_argument("--remap", action="store_true", help="Aceita qualquer par de rótulos (maior vira +1)")
    data.add_argument("--scale", action="store_true", help="Escala cada feature para [-1, 1]")
    data.add_argument("--seed", type=int, help="Semente de toda a aleatoriedade (padrão: 42)")


def build_parser():
    parser = argparse.ArgumentParser(
        description="Classificador kernel esparso treinado por maximização da AUC",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Comandos disponíveis:
  train    - Treina um modelo e grava o arquivo de modelo (e o trace CSV)
  eval     - AUC e número de funções base de um modelo em um conjunto de teste
  predict  - Scores f(x) de cada exemplo em CSV
  tune     - Busca em grade de (C, sigma) por validação cruzada
  bench    - Tempo de treino por número de threads
  config   - Mostra as configurações padrão

Exemplos:
  python main.py train data/sonar.libsvm --sigma 2 --C 10 --model-out sonar.model --trace-out trace.csv
  python main.py train data/a.libsvm --val-frac 0.2 --model-out a.model
  python main.py eval sonar.model data/sonar.test
  python main.py tune data/sonar.libsvm --grid-out grid.csv --threads 4
  python main.py bench data/big.libsvm --threads-list 1,2,4,8 --repeats 3
        """
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="Mais mensagens (-vv para debug)")
    common.add_argument("-q", "--quiet", action="store_true", help="Somente erros")
    common.add_argument("--threads", type=int, default=1, help="Threads de trabalho (padrão: 1)")
    common.add_argument("--no-banner", action="store_true", help="Não imprime o banner")

    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", parents=[common], help="Treina um modelo")
    train.add_argument("train", nargs="?", help="Arquivo LIBSVM de treino")
    add_model_arguments(train)
    val = train.add_mutually_exclusive_group()
    val.add_argument("--val-path", help="Arquivo LIBSVM de validação")
    val.add_argument("--val-frac", type=float, help="Fração do treino separada para validação")
    train.add_argument("--model-out", required=True, help="Arquivo de modelo de saída")
    train.add_argument("--trace-out", help="CSV com um registro por função base admitida")
    train.add_argument("--from-model", help="Retreina com o manifesto embutido neste modelo")

    evaluate = sub.add_parser("eval", parents=[common], help="Avalia um modelo")
    evaluate.add_argument("model", help="Arquivo de modelo")
    evaluate.add_argument("test", help="Arquivo LIBSVM de teste")
    evaluate.add_argument("--tie-credit", type=float, choices=[0.0, 0.5], help="Sobrescreve o valor do manifesto")

    predict = sub.add_parser("predict", parents=[common], help="Scores por exemplo")
    predict.add_argument("model", help="Arquivo de modelo")
    predict.add_argument("data", help="Arquivo LIBSVM")
    predict.add_argument("--out", help="CSV de saída (padrão: stdout)")

    tune = sub.add_parser("tune", parents=[common], help="Busca em grade de (C, sigma)")
    tune.add_argument("train", help="Arquivo LIBSVM de treino")
    add_model_arguments(tune)
    tune.add_argument("--C-values", type=float_list, help="Lista de C separada por vírgulas")
    tune.add_argument("--sigma-values", type=float_list, help="Lista de sigma separada por vírgulas")
    tune.add_argument("--folds", type=int, help="Número de folds (padrão: 5)")
    tune.add_argument("--runs", type=int, help="Repetições da divisão (padrão: 4)")
    tune.add_argument("--split-mode", choices=["k-fold", "holdout-fraction"], help="Tipo de divisão")
    tune.add_argument("--split-val-frac", type=float, help="Fração de validação no modo holdout")
    tune.add_argument("--grid-out", help="CSV com uma linha por ponto da grade")

    bench = sub.add_parser("bench", parents=[common], help="Tempo de treino por número de threads")
    bench.add_argument("train", help="Arquivo LIBSVM de treino")
    add_model_arguments(bench)
    bench.add_argument("--threads-list", type=int_list, help="Ex.: 1,2,4,8")
    bench.add_argument("--repeats", type=int, help="Repetições por contagem de threads (mediana)")
    bench.add_argument("--bench-out", help="CSV de saída (padrão: stdout)")

    sub.add_parser("config", parents=[common], help="Mostra as configurações padrão")
    return parser


def main(argv=None):
    """Função principal; retorna o código de saída"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(-1 if args.quiet else args.verbose)

    if not args.no_banner and not args.quiet:
        print_banner()

    from sparseauc.pipeline import commands

    handlers = {
        "train": commands.cmd_train,
        "eval": commands.cmd_eval,
        "predict": commands.cmd_predict,
        "tune": commands.cmd_tune,
        "bench": commands.cmd_bench,
        "config": commands.cmd_config,
    }

    try:
        return handlers[args.command](args)

    except FileNotFoundError as e:
        print(f"❌ Arquivo não encontrado: {e.filename or e}", file=sys.stderr)
        return EXIT_MISSING_FILE

    except (DatasetParseError, LabelError) as e:
        print(f"❌ Dados inválidos: {e}", file=sys.stderr)
        return EXIT_ERROR

    except (SplitError, ModelFormatError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ERROR

    except (SparseAUCError, ValueError) as e:
        print(f"❌ Erro: {e}", file=sys.stderr)
        return EXIT_ERROR

    except KeyboardInterrupt:
        print("\n👋 Programa interrompido pelo usuário", file=sys.stderr)
        return EXIT_INTERRUPTED

    except OSError as e:
        print(f"❌ Erro de E/S: {e}", file=sys.stderr)
        return EXIT_MISSING_FILE


if __name__ == "__main__":
    sys.exit(main())
