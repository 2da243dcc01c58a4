"""
Configurações do treinamento esparso por maximização de AUC

Este arquivo contém os valores padrão usados pelo kernel, pelo otimizador
Newton truncado, pela seleção gulosa de funções base, pela validação cruzada
e pela linha de comando. Os valores podem ser sobrescritos pelas flags da CLI;
os valores resolvidos ficam gravados no manifesto de cada modelo.
"""

import copy

# Configurações do kernel
KERNEL_CONFIG = {
    # 'gaussian' (padrão) ou 'linear' (apenas para exemplos verificáveis à mão)
    'kind': 'gaussian',

    # Largura do kernel Gaussiano: k(a, b) = exp(-||a - b||^2 / (2 sigma^2))
    'sigma': 1.0,
}

# Configurações do modelo
MODEL_CONFIG = {
    # Peso da perda dos pares violadores
    'C': 1.0,

    # Escalar cada feature para [-1, 1] pelo máximo absoluto do treino
    'scale_features': False,
}

# Configurações do Newton truncado (busca linear + gradiente conjugado)
TRON_CONFIG = {
    # Parar quando ||grad|| <= grad_tol * max(1, ||grad inicial||)
    'grad_tol': 1e-3,
    'max_newton_iters': 50,

    # Gradiente conjugado interno
    'cg_rel_tol': 1e-2,
    'cg_max_iters': 250,

    # Busca linear com backtracking (condição de Armijo)
    'ls_backtrack': 0.5,
    'ls_armijo': 1e-4,
    'ls_max_steps': 30,

    # Amortecimento relativo somado ao operador Hessiano (lambda * I)
    'damping': 1e-12,
}

# Configurações da seleção gulosa de funções base
GREEDY_CONFIG = {
    # None = min(l / 2, d_max_cap)
    'd_max': None,
    'd_max_cap': 1000,

    # Candidatos sorteados por passo (59 já cobre os 5% melhores com prob. 0.95)
    'kappa': 100,

    # 'one-dim' (Newton unidimensional) ou 'full-refit'
    'method': 'one-dim',

    # 'always', 'geometric' ou 'doubling'
    'retrain_schedule': 'geometric',
    'retrain_ratio': 2 ** 0.25,

    # 'scored' (coeficiente otimizado do candidato) ou 'zero'
    'warm_start': 'scored',

    # Newton unidimensional na pontuação de candidatos
    'onedim_tol': 1e-6,
    'onedim_max_iters': 20,

    # Empate entre candidatos: menor índice vence dentro desta tolerância
    'tie_tol': 1e-12,
}

# Parada antecipada pela AUC de validação
EARLY_STOP_CONFIG = {
    'enabled': True,
    'patience': 10,
    'min_delta': 1e-4,
}

# Configurações de divisão dos dados
CV_CONFIG = {
    'fold_count': 5,
    'runs': 4,
    'mode': 'k-fold',
    'val_fraction': 0.2,
}

# Grade de hiperparâmetros (C, sigma)
GRID_CONFIG = {
    'C_values': [10.0 ** e for e in range(-5, 6)],
    'sigma_values': [2.0 ** e for e in range(-5, 6)],
}

# Configurações de avaliação
EVAL_CONFIG = {
    # 0.0 = empates contam como erro; 0.5 = convenção usual
    'tie_credit': 0.0,
}

# Configurações de execução
RUNTIME_CONFIG = {
    'seed': 42,
    'threads': 1,

    # Tamanho mínimo de bloco de linhas por thread
    'min_chunk': 2048,

    # Ambiente onde ficam os conjuntos de dados de referência
    'data_dir_env': 'SPARSEAUC_DATA_DIR',
}

# Configurações do benchmark multi-core
BENCH_CONFIG = {
    'threads_list': [1, 2, 4, 8],
    'repeats': 3,
    'd_max': 50,
    'min_recommended_rows': 5000,
}


def get_config(config_name):
    """
    Retorna uma cópia de uma configuração específica

    Args:
        config_name (str): Nome da configuração

    Returns:
        dict: Configuração solicitada ({} se o nome não existir)
    """
    configs = {
        'kernel': KERNEL_CONFIG,
        'model': MODEL_CONFIG,
        'tron': TRON_CONFIG,
        'greedy': GREEDY_CONFIG,
        'early_stop': EARLY_STOP_CONFIG,
        'cv': CV_CONFIG,
        'grid': GRID_CONFIG,
        'eval': EVAL_CONFIG,
        'runtime': RUNTIME_CONFIG,
        'bench': BENCH_CONFIG,
    }

    return copy.deepcopy(configs.get(config_name, {}))


def print_current_config():
    """Imprime todas as configurações atuais"""
    print("📋 Configurações Atuais:")
    print("=" * 40)

    configs = [
        ('Kernel', KERNEL_CONFIG),
        ('Modelo', MODEL_CONFIG),
        ('Newton Truncado', TRON_CONFIG),
        ('Seleção Gulosa', GREEDY_CONFIG),
        ('Parada Antecipada', EARLY_STOP_CONFIG),
        ('Validação Cruzada', CV_CONFIG),
        ('Grade (C, sigma)', GRID_CONFIG),
        ('Avaliação', EVAL_CONFIG),
        ('Execução', RUNTIME_CONFIG),
        ('Benchmark', BENCH_CONFIG),
    ]

    for name, config in configs:
        print(f"\n{name}:")
        for key, value in config.items():
            print(f"  {key}: {value}")


if __name__ == "__main__":
    print_current_config()
