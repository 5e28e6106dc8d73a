"""
Serializers for channel files.

The chan-v1 format:

    {"format": "chan-v1", "din": d_in, "dout": d_out, "kind": "choi" | "kraus",
     "data": <cmat-v1> | [<cmat-v1>, ...]}

A "choi" payload is the trace-one Choi state on d_in x d_out; a "kraus"
payload lists the d_out x d_in Kraus operators (rectangular cmat-v1 objects
are accepted here only). Channels are written in the Kraus form.
"""
from typing import Any

import numpy as np
from rest_framework import serializers

from linalg.models import BipartiteOperator
from linalg.serializers import (CmatSerializer, FormatSerializer, StrictIntegerField,
                                matrix_representation)
from .models import Channel

KINDS = ("choi", "kraus")


class KrausSerializer(CmatSerializer):
    """
    A rectangular cmat-v1 operator.
    """

    square = False

    def create(self, validated_data: dict) -> np.ndarray:
        return (np.array(validated_data["re"], dtype=np.float64)
                + 1j * np.array(validated_data["im"], dtype=np.float64))


class ChannelSerializer(FormatSerializer):
    """
    Serializer for the chan-v1 format.

    The payload is checked against ``kind`` in ``validate``; it holds the
    domain objects afterwards.
    """

    format_name = "chan-v1"

    din = StrictIntegerField(min_value=1)
    dout = StrictIntegerField(min_value=1)
    kind = serializers.ChoiceField(choices=KINDS)
    data = serializers.JSONField()

    def validate(self, attrs: dict) -> dict:
        payload = attrs["data"]
        if attrs["kind"] == "choi":
            nested = CmatSerializer(data=payload)
            if not nested.is_valid():
                raise serializers.ValidationError({"data": nested.errors})
            choi = nested.save()
            size = attrs["din"] * attrs["dout"]
            if not isinstance(choi, BipartiteOperator) and choi.shape[0] != size:
                raise serializers.ValidationError({"data": {"rows": f"Choi state must be "
                                                                    f"{size} x {size}"}})
            attrs["data"] = choi
            return attrs
        if not isinstance(payload, list) or not payload:
            raise serializers.ValidationError({"data": "expected a non-empty list of "
                                                       "Kraus operators"})
        nested = KrausSerializer(data=payload, many=True)
        if not nested.is_valid():
            raise serializers.ValidationError({"data": nested.errors})
        kraus = nested.save()
        for index, k in enumerate(kraus):
            if k.shape != (attrs["dout"], attrs["din"]):
                raise serializers.ValidationError({"data": {index: (
                    f"Kraus operator must be {attrs['dout']} x {attrs['din']}, got "
                    f"{k.shape[0]} x {k.shape[1]}")}})
        attrs["data"] = kraus
        return attrs

    def to_representation(self, instance: Channel) -> dict:
        return {
            "format": self.format_name,
            "din": instance.dim_in,
            "dout": instance.dim_out,
            "kind": "kraus",
            "data": [matrix_representation(k, CmatSerializer.format_name)
                     for k in instance.kraus],
        }

    def create(self, validated_data: dict) -> Channel:
        dim_in, dim_out = validated_data["din"], validated_data["dout"]
        payload: Any = validated_data["data"]
        if validated_data["kind"] == "kraus":
            return Channel.from_kraus(payload, dim_in, dim_out)
        if not isinstance(payload, BipartiteOperator):
            payload = BipartiteOperator(dim_in, dim_out, payload)
        return Channel.from_choi(payload, dim_in, dim_out)
