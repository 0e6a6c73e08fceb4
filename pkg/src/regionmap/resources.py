"""Resolve device and circuit references: file paths or ``builtin:<name>``.

Built-in devices: ``qx2``, ``eagle`` (seeded random errors),
``grid:<rows>x<cols>``, ``heavy-hex:<distance>``, ``path:<n>``. Built-in
circuits are the QASM files shipped in ``regionmap/data/circuits``.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from .circuit import LogicalCircuit, load_qasm, parse_qasm
from .hardware import (CouplingGraph, generate_grid, generate_heavy_hex, generate_path, load_device,
                       parse_device)

PREFIX = "builtin:"


def builtin_circuits() -> list[str]:
    folder = resources.files("regionmap") / "data" / "circuits"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".qasm"))


def builtin_devices() -> list[str]:
    folder = resources.files("regionmap") / "data" / "devices"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def resolve_device(ref: str, base: Path | None = None) -> CouplingGraph:
    if not ref.startswith(PREFIX):
        path = Path(ref)
        return load_device(path if base is None or path.is_absolute() else base / path)
    name = ref[len(PREFIX):]
    if name in builtin_devices():
        text = (resources.files("regionmap") / "data" / "devices" / f"{name}.json").read_text(encoding="utf-8")
        return parse_device(text, source=ref)
    m = re.fullmatch(r"grid:(\d+)x(\d+)", name)
    if m:
        return generate_grid(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"heavy-hex:(\d+)", name)
    if m:
        return generate_heavy_hex(int(m.group(1)))
    m = re.fullmatch(r"path:(\d+)", name)
    if m:
        return generate_path(int(m.group(1)))
    raise ValueError(f"unknown built-in device {name!r}; known: {', '.join(builtin_devices())}, "
                     "grid:RxC, heavy-hex:D, path:N")


def resolve_circuit(ref: str, base: Path | None = None) -> LogicalCircuit:
    if not ref.startswith(PREFIX):
        path = Path(ref)
        return load_qasm(path if base is None or path.is_absolute() else base / path)
    name = ref[len(PREFIX):]
    if name not in builtin_circuits():
        raise ValueError(f"unknown built-in circuit {name!r}; known: {', '.join(builtin_circuits())}")
    text = (resources.files("regionmap") / "data" / "circuits" / f"{name}.qasm").read_text(encoding="utf-8")
    return parse_qasm(text, name=name)
