"""Causal CRNN mapping dual-channel spectrogram stacks to weighted
direct-path phase-difference sequences.

Ten causal convolutional modules (conv + batch norm + ReLU) with a max
pool after every second module, a flatten, one unidirectional GRU with
256 hidden units, and a linear head squashed by k_max * tanh. The five
pools compress time by 2*2*3*1*1 = 12 (so 1249 input frames become
104 output frames) and frequency by 2^5 (256 -> 8). Convolutions pad
only past time frames, so in eval mode no output frame depends on
input frames after its own 12-frame block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import nn


@dataclass(frozen=True)
class CrnnSpec:
    num_freqs: int = 256
    in_planes: int = 4
    conv_channels: int = 64
    num_conv_modules: int = 10
    kernel: int = 3
    time_pools: tuple = (2, 2, 3, 1, 1)
    freq_pools: tuple = (2, 2, 2, 2, 2)
    gru_hidden: int = 256
    k_max: int = 2

    def __post_init__(self):
        if self.num_conv_modules != 2 * len(self.time_pools):
            raise ValueError("one pooling stage per two conv modules")
        if len(self.freq_pools) != len(self.time_pools):
            raise ValueError("time and frequency pool lists must align")
        f = self.num_freqs
        for p in self.freq_pools:
            f //= p
        if f < 1:
            raise ValueError("frequency dimension pooled below 1")
        object.__setattr__(self, "time_pools", tuple(self.time_pools))
        object.__setattr__(self, "freq_pools", tuple(self.freq_pools))

    @property
    def time_compression(self) -> int:
        return math.prod(self.time_pools)

    @property
    def final_freqs(self) -> int:
        f = self.num_freqs
        for p in self.freq_pools:
            f //= p
        return f

    @property
    def output_dim(self) -> int:
        return 2 * self.num_freqs


class CausalCrnn(nn.Module):
    def __init__(self, spec: CrnnSpec = CrnnSpec()):
        super().__init__()
        self.spec = spec
        blocks = []
        in_ch = spec.in_planes
        for i in range(spec.num_conv_modules):
            blocks.append(
                nn.Sequential(
                    nn.Conv2d(in_ch, spec.conv_channels, spec.kernel,
                              padding=(0, spec.kernel // 2)),
                    nn.BatchNorm2d(spec.conv_channels),
                    nn.ReLU(),
                )
            )
            in_ch = spec.conv_channels
        self.blocks = nn.ModuleList(blocks)
        self.pools = nn.ModuleList(
            nn.MaxPool2d((t, f)) for t, f in zip(spec.time_pools, spec.freq_pools)
        )
        self.gru = nn.GRU(
            spec.conv_channels * spec.final_freqs, spec.gru_hidden, batch_first=True
        )
        self.head = nn.Linear(spec.gru_hidden, spec.output_dim)
        self._time_pad = spec.kernel - 1

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """(B, 4, T, F) -> (B, T // 12, 2F), values in [-k_max, k_max]."""
        if x.ndim != 4 or x.shape[1] != self.spec.in_planes:
            raise ValueError(f"expected (B, {self.spec.in_planes}, T, F), got {tuple(x.shape)}")
        for i, block in enumerate(self.blocks):
            x = nn.functional.pad(x, (0, 0, self._time_pad, 0))  # past frames only
            x = block(x)
            if i % 2 == 1:
                x = self.pools[i // 2](x)
        # (B, C, T', F') -> (B, T', C*F')
        x = x.permute(0, 2, 1, 3).flatten(2)
        x, _ = self.gru(x)
        return self.spec.k_max * torch.tanh(self.head(x))


def save_checkpoint(path, model: CausalCrnn, extra: dict | None = None) -> None:
    torch.save(
        {"spec": model.spec.__dict__, "state": model.state_dict(), "extra": extra or {}},
        path,
    )


def load_checkpoint(path) -> CausalCrnn:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    model = CausalCrnn(CrnnSpec(**blob["spec"]))
    model.load_state_dict(blob["state"])
    model.eval()
    return model
