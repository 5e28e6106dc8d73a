"""
Serializers for state files and monotone results.

- ``DensityOperatorSerializer``: cmat-v1 with mandatory ``dims``, parsed into
  a validated ``DensityOperator``.
- ``MonotoneResultSerializer``: the result-v1 format

    {"format": "result-v1", "measure": "tneg", "value": 2.0,
     "certificate": {"passed", "gap", "residuals": {"primal", "dual"},
                     "solves": [...], "notes": [...]},
     "witness": <cmat-v1> | null}
"""
from typing import Any

from rest_framework import serializers

from linalg.serializers import (CmatSerializer, FiniteFloatField, FormatSerializer,
                                StrictIntegerField)
from .models import DensityOperator, MonotoneResult


class DensityOperatorSerializer(CmatSerializer):
    """
    Serializer of bipartite states in the cmat-v1 format.
    """

    dims = serializers.ListField(child=StrictIntegerField(min_value=1), min_length=2,
                                 max_length=2,
                                 error_messages={"required": "a state file must give the "
                                                             "subsystem dimensions"})

    def to_representation(self, instance: DensityOperator) -> dict:
        return super().to_representation(instance.op)

    def create(self, validated_data: dict) -> DensityOperator:
        return DensityOperator(super().create(validated_data))


class CertificateSerializer(serializers.Serializer):
    """
    The aggregated certificate of a result.
    """

    passed = serializers.BooleanField()
    gap = FiniteFloatField()
    residuals = serializers.DictField(child=FiniteFloatField())
    solves = serializers.ListField(child=serializers.DictField())
    notes = serializers.ListField(child=serializers.CharField(allow_blank=True))


class MonotoneResultSerializer(FormatSerializer):
    """
    Serializer of the result-v1 format.

    Parsing returns the validated fields as a dict; the witness becomes a
    ``BipartiteOperator`` (or None).
    """

    format_name = "result-v1"

    measure = serializers.CharField()
    value = FiniteFloatField()
    certificate = CertificateSerializer()
    witness = CmatSerializer(allow_null=True)

    def validate_witness(self, value: Any) -> Any:
        if value is not None and "dims" not in value:
            raise serializers.ValidationError("witness must give the subsystem dimensions")
        return value

    def to_representation(self, instance: MonotoneResult) -> dict:
        witness = None
        if instance.witness is not None:
            witness = CmatSerializer(instance.witness).data
        return {
            "format": self.format_name,
            "measure": instance.measure,
            "value": instance.value,
            "certificate": instance.certificate,
            "witness": witness,
        }

    def create(self, validated_data: dict) -> dict:
        witness = validated_data["witness"]
        if witness is not None:
            witness = CmatSerializer().create(witness)
        return {"measure": validated_data["measure"], "value": validated_data["value"],
                "certificate": dict(validated_data["certificate"]), "witness": witness}
