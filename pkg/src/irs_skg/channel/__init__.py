"""Geometric direct channels and IRS-cascaded legitimate and wiretap channels."""

from irs_skg.channel.cascade import (
    ChannelSet,
    EveLink,
    Party,
    Topology,
    build_channel_set,
    cascaded_channel,
    eve_channel,
    stacked_eve_channel,
)
from irs_skg.channel.geometry import (
    ArrayGeometry,
    ArrayKind,
    DirectChannel,
    PathParams,
    PathStats,
    array_response,
    geometric_channel,
    random_direct_channel,
    random_paths,
)

__all__ = [
    "ArrayGeometry",
    "ArrayKind",
    "ChannelSet",
    "DirectChannel",
    "EveLink",
    "Party",
    "PathParams",
    "PathStats",
    "Topology",
    "array_response",
    "build_channel_set",
    "cascaded_channel",
    "eve_channel",
    "geometric_channel",
    "random_direct_channel",
    "random_paths",
    "stacked_eve_channel",
]
