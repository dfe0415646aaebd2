#!/usr/bin/env python3
"""Emit the CIFAR ResNet-(6n+2) architecture file and count its parameters.

Basic-block ResNet for 32x32 inputs: a 3x3 stem conv, three stages of n
blocks (16, 32, 64 channels), parameter-free identity shortcuts with zero
padding on the channel jumps, batch norm after every conv, global average
pooling and a 10-way fully connected layer.

Usage: gen_resnet_arch.py [--depth 110] [--r 4] [--out data/resnet110.arch.json]
"""

import argparse
import json
import sys


def build(depth):
    if (depth - 2) % 6:
        raise SystemExit("depth must be 6n + 2")
    n = (depth - 2) // 6
    layers = []

    def conv(name, c_in, c_out, d):
        layers.append({"type": "conv", "name": name, "c_in": c_in, "s1": 3, "s2": 3,
                       "c_out": c_out, "d1": d, "d2": d})
        layers.append({"type": "bn", "name": name + "_bn", "channels": c_out})

    conv("conv1", 3, 16, 32)
    c_in = 16
    for stage, (width, d) in enumerate([(16, 32), (32, 16), (64, 8)], start=1):
        for block in range(n):
            prefix = f"stage{stage}_block{block}"
            conv(prefix + "_conv1", c_in, width, d)
            conv(prefix + "_conv2", width, width, d)
            c_in = width
    layers.append({"type": "fc", "name": "fc", "inputs": 64, "outputs": 10, "bias": True})
    return layers


def count(layers):
    totals = {"conv": 0, "bn": 0, "fc": 0}
    for layer in layers:
        if layer["type"] == "conv":
            totals["conv"] += layer["c_in"] * layer["s1"] * layer["s2"] * layer["c_out"]
        elif layer["type"] == "bn":
            totals["bn"] += 2 * layer["channels"]
        else:
            totals["fc"] += layer["inputs"] * layer["outputs"] + layer["outputs"]
    totals["total"] = sum(totals.values())
    return totals


def render(name, r, layers):
    lines = ["{",
             f'  "name": {json.dumps(name)},',
             f'  "r": {json.dumps(r)},',
             '  "stride_policy": "channel_aligned",',
             '  "layers": [']
    body = [json.dumps(layer, separators=(",", ":")) for layer in layers]
    lines.append(",\n".join("    " + b for b in body))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--depth", type=int, default=110)
    parser.add_argument("--r", default="4")
    parser.add_argument("--out")
    args = parser.parse_args()

    layers = build(args.depth)
    text = render(f"resnet{args.depth}", args.r, layers)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    print(json.dumps(count(layers)), file=sys.stderr)


if __name__ == "__main__":
    main()
