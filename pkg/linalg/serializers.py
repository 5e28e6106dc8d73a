"""
Serializers for matrix files.

This module defines the JSON serializers shared by every app. They are Django
REST framework serializers: ``FormatSerializer`` is the base class of the
versioned formats. A subclass names its ``format_name``, declares its fields,
builds the domain object in ``create`` and writes it in
``to_representation``. ``CmatSerializer`` handles the cmat-v1 matrix format:

    {"format": "cmat-v1", "rows": n, "cols": n, "re": [[...]], "im": [[...]],
     "dims": [dA, dB]}

``dims`` is present for bipartite operators only.

Field errors of REST framework are flattened into the project's
``ValidationError`` with a field path such as ``data[0].re[1][2]``.

Output is deterministic: keys are sorted and floats are rounded to 12
significant digits.
"""
import io
import math
import os
from typing import Any, Optional, Tuple, Union

import django
import numpy as np

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "tempered.settings")
django.setup()

from rest_framework import serializers
from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer
from rest_framework.settings import api_settings

from tempered.exceptions import ValidationError
from .models import BipartiteOperator, ComplexMatrix

SIGNIFICANT_DIGITS = 12


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """
    Rounds a float to the given number of significant digits.

    Args:
        value (float): The value to round.
        digits (int): Significant digits kept.

    Returns:
        float: The rounded value; -0.0 is normalised to 0.0.
    """
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"refusing to serialise non-finite value {value}")
    if value == 0.0:
        return 0.0
    rounded = float(f"{value:.{digits}g}")
    return rounded + 0.0


def rounded(data: Any) -> Any:
    """
    Recursively rounds every float and sorts every dict by key.
    """
    if isinstance(data, bool) or data is None:
        return data
    if isinstance(data, (float, np.floating)):
        return round_significant(float(data))
    if isinstance(data, (int, np.integer)):
        return int(data)
    if isinstance(data, dict):
        return {str(key): rounded(data[key]) for key in sorted(data, key=str)}
    if isinstance(data, (list, tuple)):
        return [rounded(item) for item in data]
    return data


def first_error(detail: Any, path: str = "") -> Optional[Tuple[str, str]]:
    """
    Finds the first message of a REST framework error detail.

    Args:
        detail: ``serializer.errors`` or ``exc.detail``.
        path (str): Field path of ``detail``.

    Returns:
        tuple: ``(field path, message)``, or None when ``detail`` is empty.
    """
    if isinstance(detail, dict):
        for key, value in detail.items():
            if key == api_settings.NON_FIELD_ERRORS_KEY:
                sub = path
            elif isinstance(key, int):
                sub = f"{path}[{key}]"
            else:
                sub = f"{path}.{key}" if path else str(key)
            found = first_error(value, sub)
            if found is not None:
                return found
        return None
    if isinstance(detail, list):
        for index, item in enumerate(detail):
            if isinstance(item, (dict, list)):
                found = first_error(item, f"{path}[{index}]")
                if found is not None:
                    return found
            else:
                return path, str(item)
        return None
    return path, str(detail)


def as_validation_error(detail: Any) -> ValidationError:
    """
    Converts REST framework error detail into a ``ValidationError``.
    """
    found = first_error(detail)
    if found is None:
        return ValidationError("invalid input")
    field, message = found
    return ValidationError(message, field or None)


class FiniteFloatField(serializers.FloatField):
    """
    A JSON number that is finite as a float.

    Booleans and strings are rejected.
    """

    default_error_messages = {
        "invalid": "A number is required.",
        "non_finite": "NaN, Inf and numbers beyond the float range are not allowed.",
    }

    def to_internal_value(self, data: Any) -> float:
        if isinstance(data, (bool, str)) or not isinstance(data, (int, float)):
            self.fail("invalid")
        try:
            value = float(data)
        except OverflowError:
            self.fail("non_finite")
        if not math.isfinite(value):
            self.fail("non_finite")
        return value


class StrictIntegerField(serializers.IntegerField):
    """
    A JSON integer; booleans, strings and floats are rejected.
    """

    def to_internal_value(self, data: Any) -> int:
        if isinstance(data, bool) or not isinstance(data, int):
            self.fail("invalid")
        return super().to_internal_value(data)


def grid_field(**kwargs: Any) -> serializers.ListField:
    """
    A list of rows of finite numbers.
    """
    return serializers.ListField(child=serializers.ListField(child=FiniteFloatField()), **kwargs)


class FormatSerializer(serializers.Serializer):
    """
    Base class of the versioned JSON formats.

    Attributes:
        format_name (str): Value of the ``format`` field.
    """

    format_name: str = ""

    format = serializers.CharField()

    def validate_format(self, value: str) -> str:
        if value != self.format_name:
            raise serializers.ValidationError(f"expected {self.format_name!r}, got {value!r}")
        return value

    def update(self, instance: Any, validated_data: dict) -> Any:
        raise NotImplementedError("the file formats are immutable")

    def parse(self, data: Any) -> Any:
        """
        Validates parsed JSON and builds the domain object.

        Raises:
            ValidationError: Naming the first offending field.
        """
        serializer = type(self)(data=data)
        if not serializer.is_valid():
            raise as_validation_error(serializer.errors)
        return serializer.save()

    def dumps(self, instance: Any) -> str:
        """
        Serialises to a deterministic JSON string.
        """
        data = rounded(type(self)(instance).data)
        return JSONRenderer().render(data, renderer_context={"indent": 2}).decode("utf-8") + "\n"

    def loads(self, text: str) -> Any:
        """
        Parses a JSON string.

        Raises:
            ValidationError: On malformed JSON, NaN or Inf literals, or bad
                contents.
        """
        try:
            data = JSONParser().parse(io.BytesIO(text.encode("utf-8")))
        except ParseError as exc:
            raise ValidationError(str(exc.detail), "json") from exc
        return self.parse(data)

    def load(self, path: str) -> Any:
        """
        Reads and parses a file.
        """
        try:
            with open(path, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ValidationError(f"cannot read {path}: {exc.strerror}", "path") from exc
        return self.loads(text)

    def dump(self, instance: Any, path: str) -> None:
        """
        Writes the serialised instance to a file.
        """
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.dumps(instance))


def matrix_representation(matrix: np.ndarray, format_name: str) -> dict:
    return {
        "format": format_name,
        "rows": int(matrix.shape[0]),
        "cols": int(matrix.shape[1]),
        "re": matrix.real.tolist(),
        "im": matrix.imag.tolist(),
    }


class CmatSerializer(FormatSerializer):
    """
    Serializer for the cmat-v1 matrix format.

    ``create`` returns a ``BipartiteOperator`` when ``dims`` is present and a
    plain ComplexMatrix otherwise.

    Attributes:
        square (bool): Whether rows must equal cols.
    """

    format_name = "cmat-v1"
    square = True

    rows = StrictIntegerField(min_value=1)
    cols = StrictIntegerField(min_value=1)
    re = grid_field()
    im = grid_field()
    dims = serializers.ListField(child=StrictIntegerField(min_value=1), min_length=2,
                                 max_length=2, required=False)

    def validate(self, attrs: dict) -> dict:
        rows, cols = attrs["rows"], attrs["cols"]
        if self.square and rows != cols:
            raise serializers.ValidationError({"rows": f"matrix must be square, got "
                                                       f"{rows} x {cols}"})
        for name in ("re", "im"):
            grid = attrs[name]
            if len(grid) != rows:
                raise serializers.ValidationError({name: f"expected {rows} rows"})
            for r, row in enumerate(grid):
                if len(row) != cols:
                    raise serializers.ValidationError({name: f"row {r} must have {cols} "
                                                             f"entries"})
        if "dims" in attrs and attrs["dims"][0] * attrs["dims"][1] != rows:
            raise serializers.ValidationError({"dims": f"{attrs['dims'][0]} x "
                                                       f"{attrs['dims'][1]} does not match "
                                                       f"{rows} rows"})
        return attrs

    def to_representation(self, instance: Union[BipartiteOperator, ComplexMatrix]) -> dict:
        if isinstance(instance, BipartiteOperator):
            data = matrix_representation(instance.matrix, self.format_name)
            data["dims"] = [instance.dim_a, instance.dim_b]
            return data
        return matrix_representation(np.asarray(instance, dtype=np.complex128),
                                     self.format_name)

    def create(self, validated_data: dict) -> Union[BipartiteOperator, ComplexMatrix]:
        matrix = (np.array(validated_data["re"], dtype=np.float64)
                  + 1j * np.array(validated_data["im"], dtype=np.float64))
        if "dims" not in validated_data:
            return matrix
        dim_a, dim_b = validated_data["dims"]
        return BipartiteOperator(dim_a, dim_b, matrix)
