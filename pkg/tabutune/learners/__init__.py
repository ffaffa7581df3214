from tabutune.metrics import DomainError
from tabutune.learners.base import FitError, Learner, TrainedModel, score
from tabutune.learners.params import AdabParams, GbtParams, MlpParams
from tabutune.learners.tree import DecisionTreeModel, TreeStructure, fit_tree, fit_tree_arrays, gini
from tabutune.learners.adaboost import AdaBoostLearner, AdaBoostModel, adaboost_alpha, fit_adaboost
from tabutune.learners.gbt import GbtLearner, GbtModel, fit_gbt
from tabutune.learners.mlp import MlpLearner, MlpModel, fit_mlp

LEARNERS: dict[str, Learner] = {
    learner.name: learner
    for learner in (GbtLearner(), AdaBoostLearner(), MlpLearner())
}


def get_learner(name: str) -> Learner:
    try:
        return LEARNERS[name]
    except KeyError:
        raise ValueError(f"unknown learner: {name} (choose from {', '.join(LEARNERS)})")


__all__ = [
    "DomainError", "FitError", "Learner", "TrainedModel", "score",
    "AdabParams", "GbtParams", "MlpParams",
    "DecisionTreeModel", "TreeStructure", "fit_tree", "fit_tree_arrays", "gini",
    "AdaBoostLearner", "AdaBoostModel", "adaboost_alpha", "fit_adaboost",
    "GbtLearner", "GbtModel", "fit_gbt",
    "MlpLearner", "MlpModel", "fit_mlp",
    "LEARNERS", "get_learner",
]
