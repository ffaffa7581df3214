from __future__ import annotations

import logging

from pydantic import ValidationError

from tabutune.config import config as global_config
from tabutune.dataset import Dataset
from tabutune.learners import FitError, Learner, score
from tabutune.metrics import DomainError, roc_auc
from tabutune.tuning.space import ParamSpace, ParamVector
from tabutune.utils.cache import LruCache, memoize

logger = logging.getLogger(__name__)

FAILED_AUC = 0.5


class AucObjective:
    """
    Test-split AUC of a learner fitted with the decoded parameter vector.
    Repeated vectors are served from an LRU memo.
    """
    def __init__(self, learner: Learner, space: ParamSpace, train: Dataset, test: Dataset, seed: int=0, cache_size: int=4096):
        if train.feature_names != test.feature_names:
            raise ValueError("train and test splits have different features")
        self.learner = learner
        self.space = space
        self.train = train
        self.test = test
        self.seed = seed
        self.failures = 0
        self.cache: LruCache[float] = LruCache(cache_size, name=f"objective:{learner.name}")
        self._memoized = memoize(self.cache, self.space.key, lambda: bool(global_config.caching))(self._evaluate)

    def __repr__(self) -> str:
        return f"<AucObjective {self.learner.name} on {self.train.n_features} features>"

    def __call__(self, vector: ParamVector) -> float:
        return self._memoized(vector)

    def _evaluate(self, vector: ParamVector) -> float:
        values = self.space.as_dict(self.space.repair(vector))
        try:
            params = self.learner.params_from_dict(values)
            model = self.learner.fit(self.train, params, self.seed)
            auc, _ = roc_auc(self.test.labels, score(model, self.test))
        except (FitError, DomainError, ValidationError) as e:
            self.failures += 1
            logger.warning(f"{self.learner.name} failed at {values}, scoring {FAILED_AUC}: {e}")
            return FAILED_AUC

        logger.debug(f"{self.learner.name} {values} -> auc {auc:.6f}")
        return auc


def make_objective(learner: Learner, space: ParamSpace, train: Dataset, test: Dataset, seed: int=0) -> AucObjective:
    return AucObjective(learner, space, train, test, seed)
