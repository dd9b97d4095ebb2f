import typing

import numpy as np

from ..utils.data_classes import OptimizerSettings
from .modules import Parameter


class LearningRateSchedule:
    """lr0 * decay_rate ** (t / decay_steps) * step_factor ** (t // step_period)"""

    def __init__(self, settings: OptimizerSettings):
        self.settings = settings

    def __call__(self, step: int) -> float:
        s = self.settings
        return s.learning_rate * s.decay_rate ** (step / s.decay_steps) * s.step_factor ** (step // s.step_period)


class Adam:
    """Adam with bias correction.

    Parameters whose gradient is None are left untouched, moments included,
    so a branch outside the loss keeps bit-identical values.
    """

    def __init__(self, parameters: typing.Sequence[Parameter], settings: OptimizerSettings = OptimizerSettings()):
        self.params = list(parameters)
        self.settings = settings
        self.schedule = LearningRateSchedule(settings)
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]
        self.t = 0

    @property
    def learning_rate(self) -> float:
        return self.schedule(self.t)

    def step(self):
        lr = self.schedule(self.t)
        self.t += 1
        beta1, beta2, eps = self.settings.beta1, self.settings.beta2, self.settings.eps
        for i, p in enumerate(self.params):
            if p.grad is None:
                continue
            self.m[i] = beta1 * self.m[i] + (1 - beta1) * p.grad
            self.v[i] = beta2 * self.v[i] + (1 - beta2) * (p.grad**2)
            m_hat = self.m[i] / (1 - beta1**self.t)
            v_hat = self.v[i] / (1 - beta2**self.t)
            p.data -= lr * m_hat / (np.sqrt(v_hat) + eps)

    def zero_grad(self):
        for p in self.params:
            p.grad = None
