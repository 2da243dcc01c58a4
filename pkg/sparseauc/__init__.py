"""Classificador kernel esparso treinado por maximização direta da AUC"""

__version__ = "0.1.0"
