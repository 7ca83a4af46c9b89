#!/usr/bin/env python3
"""Export the Vgg16 feature taps consumed by the deep backend.

Writes a single .onnx file containing the convolutional trunk up to the
second tap, plus a .json sidecar with the input normalization the loader
applies. The graph uses only Conv / Relu / MaxPool with explicit pads,
which is the subset the bundled reader executes.

Tap points (torchvision vgg16, .features indices):

  name     tensor                                   stride  channels
  layer3   output of .features[9]  (second maxpool)    4       128
  layer14  output of .features[29] (relu after the
           thirteenth 3x3 convolution)                16       512

Both taps are graph outputs, so either can be requested by name at
inference time from the same file.

Weights come from --weights:
  download   fetch the torchvision IMAGENET1K_V1 checkpoint (needs network)
  none       randomly initialized trunk, for structural smoke tests only
  <path>     a torchvision-format state dict (.pth); classifier keys are
             ignored, "module." prefixes and {"state_dict": ...} wrappers
             are stripped
"""

import argparse
import json
import sys

import torch
import torchvision

# [0,1]-unit channel statistics the checkpoint was trained with; the
# loader reads these from the sidecar and applies them before inference.
INPUT_MEAN = [0.485, 0.456, 0.406]
INPUT_STD = [0.229, 0.224, 0.225]

SHALLOW_END = 10  # .features[:10] ends at the second maxpool
DEEP_END = 30     # .features[:30] ends at the relu after conv thirteen

TAPS = {
    "layer3": {
        "stride": 4,
        "channels": 128,
        "source": "torchvision vgg16 .features[9] output (second maxpool)",
    },
    "layer14": {
        "stride": 16,
        "channels": 512,
        "source": "torchvision vgg16 .features[29] output "
                  "(relu after the thirteenth convolution)",
    },
}


class Taps(torch.nn.Module):
    """Convolutional trunk returning both tap tensors."""

    def __init__(self, features: torch.nn.Sequential):
        super().__init__()
        self.shallow = features[:SHALLOW_END]
        self.trunk = features[SHALLOW_END:DEEP_END]

    def forward(self, x):
        a = self.shallow(x)
        return a, self.trunk(a)


def load_features(weights: str) -> torch.nn.Sequential:
    if weights == "download":
        return torchvision.models.vgg16(weights="IMAGENET1K_V1").features
    model = torchvision.models.vgg16(weights=None)
    if weights == "none":
        return model.features

    state = torch.load(weights, map_location="cpu", weights_only=True)
    if isinstance(state, dict) and isinstance(state.get("state_dict"), dict):
        state = state["state_dict"]
    state = {k.removeprefix("module."): v for k, v in state.items()}
    feature_state = {k: v for k, v in state.items() if k.startswith("features.")}
    missing, _ = model.load_state_dict(feature_state, strict=False)
    missing_features = [k for k in missing if k.startswith("features.")]
    if missing_features:
        raise SystemExit(f"{weights}: no weights for {missing_features}")
    return model.features


def patch_exporter_if_needed() -> None:
    # The TorchScript exporter finishes with an inlining pass for custom
    # onnxscript functions that imports the onnx package even when, as
    # here, there are none to inline and the pass is an identity. Make it
    # one explicitly when the package is absent.
    try:
        import onnx  # noqa: F401
        return
    except ImportError:
        pass
    for mod in (
        "torch.onnx._internal.torchscript_exporter.onnx_proto_utils",
        "torch.onnx._internal.onnx_proto_utils",
    ):
        try:
            proto_utils = __import__(mod, fromlist=["_add_onnxscript_fn"])
        except ImportError:
            continue
        proto_utils._add_onnxscript_fn = lambda model_bytes, custom_opsets: model_bytes
        return
    raise SystemExit("onnx package not installed and the exporter's "
                     "inlining pass could not be bypassed; pip install onnx")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--weights", default="download",
                    help="'download', 'none', or a state-dict path (default: download)")
    ap.add_argument("-o", "--output", default="vgg16_taps.onnx",
                    help="output model path (default: %(default)s)")
    ap.add_argument("--trace-size", type=int, default=224,
                    help="square input size used to trace the export; "
                         "height and width stay dynamic (default: %(default)s)")
    ap.add_argument("--opset", type=int, default=13)
    args = ap.parse_args()

    features = load_features(args.weights).eval()
    taps = Taps(features).eval()
    patch_exporter_if_needed()

    example = torch.zeros(1, 3, args.trace_size, args.trace_size)
    dynamic = {name: {2: "height", 3: "width"}
               for name in ("input", "layer3", "layer14")}
    with torch.no_grad():
        torch.onnx.export(
            taps, (example,), args.output,
            input_names=["input"],
            output_names=["layer3", "layer14"],
            dynamic_axes=dynamic,
            opset_version=args.opset,
            do_constant_folding=True,
            dynamo=False,
        )

    sidecar = {
        "input_mean": INPUT_MEAN,
        "input_std": INPUT_STD,
        "input_layout": "1x3xHxW, RGB scaled to [0,1] before normalization",
        "taps": TAPS,
        "weights": args.weights,
        "opset": args.opset,
    }
    sidecar_path = args.output + ".json"
    with open(sidecar_path, "w") as f:
        json.dump(sidecar, f, indent=2)
        f.write("\n")

    print(f"wrote {args.output} and {sidecar_path}", file=sys.stderr)
    for name, tap in TAPS.items():
        print(f"  {name}: stride {tap['stride']}, {tap['channels']} channels "
              f"({tap['source']})", file=sys.stderr)


if __name__ == "__main__":
    main()
