"""
Serializers for canonical SDP problems.

The sdp-v1 format dumps a compiled ``SdpProblem`` for cross-checking with an
external solver:

    {"format": "sdp-v1", "name": ..., "sense": "min" | "max", "offset": c,
     "blocks": [[size, "psd" | "nonneg"], ...],
     "C": [block, ...],
     "A": [{"rows": [...], "cols": [...], "vals": [...]}, ...],
     "b": [...]}

``C`` holds one grid per block: the n x n matrix of a psd block, a single
row for a nonneg block. ``A`` holds one sparse triplet list per block over
the (m x width) constraint matrix, where the column index is the row-major
position inside the block.
"""
from typing import List

import numpy as np
import scipy.sparse as sp
from rest_framework import serializers

from linalg.serializers import (FiniteFloatField, FormatSerializer, StrictIntegerField,
                                grid_field)
from tempered.exceptions import ValidationError
from .models import BLOCK_KINDS, SENSES, Block, SdpProblem, block_shape


class BlockField(serializers.Field):
    """
    A ``[size, kind]`` pair parsed into a ``Block``.
    """

    def to_representation(self, value: Block) -> list:
        return [int(value.size), value.kind]

    def to_internal_value(self, data: object) -> Block:
        if not isinstance(data, list) or len(data) != 2:
            raise serializers.ValidationError("each block must be [size, kind]")
        size, kind = data
        if isinstance(size, bool) or not isinstance(size, int) or kind not in BLOCK_KINDS:
            raise serializers.ValidationError(f"expected [size, one of {BLOCK_KINDS}], "
                                              f"got {data!r}")
        try:
            return Block(size, kind)
        except ValidationError as exc:
            raise serializers.ValidationError(str(exc.args[0])) from exc


class TripletSerializer(serializers.Serializer):
    """
    One block of the constraint matrix as sparse triplets.
    """

    rows = serializers.ListField(child=StrictIntegerField(min_value=0))
    cols = serializers.ListField(child=StrictIntegerField(min_value=0))
    vals = serializers.ListField(child=FiniteFloatField())

    def validate(self, attrs: dict) -> dict:
        if not len(attrs["rows"]) == len(attrs["cols"]) == len(attrs["vals"]):
            raise serializers.ValidationError("rows, cols and vals must have equal length")
        return attrs


class SdpProblemSerializer(FormatSerializer):
    """
    Serializer for the sdp-v1 problem dump.
    """

    format_name = "sdp-v1"

    name = serializers.CharField(default="sdp")
    sense = serializers.ChoiceField(choices=SENSES)
    offset = FiniteFloatField(default=0.0)
    blocks = serializers.ListField(child=BlockField(), min_length=1)
    C = serializers.ListField(child=grid_field())
    A = TripletSerializer(many=True)
    b = serializers.ListField(child=FiniteFloatField())

    def validate(self, attrs: dict) -> dict:
        blocks: List[Block] = attrs["blocks"]
        if len(attrs["C"]) != len(blocks):
            raise serializers.ValidationError({"C": "one entry per block expected"})
        if len(attrs["A"]) != len(blocks):
            raise serializers.ValidationError({"A": "one entry per block expected"})
        for k, (block, grid) in enumerate(zip(blocks, attrs["C"])):
            rows, cols = (block.size, block.size) if block.kind == "psd" else (1, block.size)
            if len(grid) != rows or any(len(row) != cols for row in grid):
                raise serializers.ValidationError({"C": {k: f"expected a {rows} x {cols} grid"}})
        m = len(attrs["b"])
        for k, (block, triplets) in enumerate(zip(blocks, attrs["A"])):
            if any(r >= m for r in triplets["rows"]) or \
                    any(c >= block.width for c in triplets["cols"]):
                raise serializers.ValidationError({"A": {k: f"index outside the {m} x "
                                                            f"{block.width} block"}})
        return attrs

    def to_representation(self, instance: SdpProblem) -> dict:
        triplets = []
        for a in instance.constraints:
            coo = sp.coo_matrix(a)
            order = np.lexsort((coo.col, coo.row))
            triplets.append({"rows": coo.row[order].tolist(), "cols": coo.col[order].tolist(),
                             "vals": coo.data[order].tolist()})
        return {
            "format": self.format_name,
            "name": instance.name,
            "sense": instance.sense,
            "offset": instance.offset,
            "blocks": [[int(block.size), block.kind] for block in instance.blocks],
            "C": [np.atleast_2d(c).tolist() for c in instance.objective],
            "A": triplets,
            "b": instance.rhs.tolist(),
        }

    def create(self, validated_data: dict) -> SdpProblem:
        blocks = tuple(validated_data["blocks"])
        rhs = np.array(validated_data["b"], dtype=np.float64)
        objective = []
        constraints = []
        for block, c, a in zip(blocks, validated_data["C"], validated_data["A"]):
            objective.append(np.array(c, dtype=np.float64).reshape(block_shape(block)))
            constraints.append(sp.csr_matrix(
                (np.array(a["vals"], dtype=np.float64),
                 (np.array(a["rows"], dtype=int), np.array(a["cols"], dtype=int))),
                shape=(rhs.size, block.width)))
        return SdpProblem(blocks, tuple(objective), tuple(constraints), rhs,
                          validated_data["sense"], validated_data["offset"],
                          validated_data["name"])
