"""Canonical 27-channel lower-face blendshape space.

The toolkit works on the jaw and mouth subset of the standard 52 ARKit
blendshapes: 4 jaw channels plus 23 mouth channels, in a fixed order.
Every frame, trajectory and file format in the package uses this ordering;
files additionally carry the channel list so they stay self-describing.
"""

CHANNELS: tuple[str, ...] = (
    "jawForward",
    "jawLeft",
    "jawRight",
    "jawOpen",
    "mouthClose",
    "mouthFunnel",
    "mouthPucker",
    "mouthLeft",
    "mouthRight",
    "mouthSmileLeft",
    "mouthSmileRight",
    "mouthFrownLeft",
    "mouthFrownRight",
    "mouthDimpleLeft",
    "mouthDimpleRight",
    "mouthStretchLeft",
    "mouthStretchRight",
    "mouthRollLower",
    "mouthRollUpper",
    "mouthShrugLower",
    "mouthShrugUpper",
    "mouthPressLeft",
    "mouthPressRight",
    "mouthLowerDownLeft",
    "mouthLowerDownRight",
    "mouthUpperUpLeft",
    "mouthUpperUpRight",
)

NUM_CHANNELS = len(CHANNELS)

CHANNEL_INDEX: dict[str, int] = {name: i for i, name in enumerate(CHANNELS)}

JAW_OPEN = CHANNEL_INDEX["jawOpen"]


def channel_index(name: str) -> int:
    """Index of a canonical channel name."""
    try:
        return CHANNEL_INDEX[name]
    except KeyError:
        raise KeyError(f"unknown blendshape channel {name!r}") from None
