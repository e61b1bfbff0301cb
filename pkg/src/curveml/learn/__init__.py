from curveml.learn.data import SplitConfig, balance_classes, split
from curveml.learn.forest import ForestHyper, ForestModel, predict_forest, train_random_forest
from curveml.learn.logistic import LogisticHyper, LogisticModel, predict_logistic, train_logistic
from curveml.learn.naive_bayes import NaiveBayesModel, predict_nb, train_gaussian_nb, train_naive_bayes

__all__ = [
    "ForestHyper",
    "ForestModel",
    "LogisticHyper",
    "LogisticModel",
    "NaiveBayesModel",
    "SplitConfig",
    "balance_classes",
    "predict_forest",
    "predict_logistic",
    "predict_nb",
    "split",
    "train_gaussian_nb",
    "train_logistic",
    "train_naive_bayes",
    "train_random_forest",
]
