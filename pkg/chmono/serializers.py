"""
Serializers for irreversibility reports.

report-v1:

    {"format": "report-v1", "channel": "omega3",
     "bounds": {"ec_lower_bound": 1.0, "q_upper_bound": 0.585, "gap": 0.415,
                "per_copy": [[1, 1.0], [2, 1.0]], "label": "finite-n lower bound"},
     "certificates": {"ec-1": {...}, "qcap": {...}},
     "flags": {"irreversibility_witnessed": true}}

The per-copy values are also exported as CSV with the header ``n,value``.
"""
import csv
import io
from typing import List, Tuple

from rest_framework import serializers

from linalg.serializers import (SIGNIFICANT_DIGITS, FiniteFloatField, FormatSerializer,
                                round_significant)
from .models import BoundReport


class BoundsSerializer(serializers.Serializer):
    """
    The ``bounds`` object of a report.
    """

    ec_lower_bound = FiniteFloatField()
    q_upper_bound = FiniteFloatField()
    gap = FiniteFloatField()
    per_copy = serializers.ListField(
        child=serializers.ListField(child=FiniteFloatField(), min_length=2, max_length=2))
    label = serializers.CharField(required=False, allow_null=True)

    def validate_per_copy(self, value: List[List[float]]) -> List[Tuple[int, float]]:
        entries = []
        for n, bound in value:
            if not n.is_integer() or n < 1:
                raise serializers.ValidationError(f"copy count {n} is not a positive integer")
            entries.append((int(n), bound))
        return entries


class BoundReportSerializer(FormatSerializer):
    """
    Serializer for the report-v1 format.

    Parsing returns the validated fields as a dict; certificates stay in
    their JSON form.
    """

    format_name = "report-v1"

    channel = serializers.CharField()
    bounds = BoundsSerializer()
    certificates = serializers.DictField(child=serializers.DictField())
    flags = serializers.DictField(child=serializers.BooleanField())

    def to_representation(self, instance: BoundReport) -> dict:
        return {
            "format": self.format_name,
            "channel": instance.channel_id,
            "bounds": {
                "ec_lower_bound": instance.ec_lower_bound,
                "q_upper_bound": instance.q_upper_bound,
                "gap": instance.gap,
                "per_copy": [[n, value] for n, value in instance.per_copy_tempered_neg],
                "label": instance.label,
            },
            "certificates": {name: report.to_dict()
                             for name, report in instance.certificates.items()},
            "flags": dict(instance.flags),
        }

    def create(self, validated_data: dict) -> dict:
        bounds = validated_data["bounds"]
        return {"channel": validated_data["channel"], "per_copy": bounds["per_copy"],
                "flags": dict(validated_data["flags"]),
                "certificates": dict(validated_data["certificates"]),
                "label": bounds.get("label"),
                **{name: bounds[name] for name in ("ec_lower_bound", "q_upper_bound", "gap")}}


def per_copy_csv(report: BoundReport) -> str:
    """
    Returns the per-copy bounds as CSV with the header ``n,value``.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "value"])
    for n, value in report.per_copy_tempered_neg:
        writer.writerow([n, f"{round_significant(value):.{SIGNIFICANT_DIGITS}g}"])
    return buffer.getvalue()
