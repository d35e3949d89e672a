"""
File formats for comarr
Arrangement, configuration, complex and report files
"""

import csv
import hashlib
import json
import os
from typing import Any, Dict, List, Sequence, Tuple

from ..exceptions import InvalidInputError


def canonical_json(data: Any) -> str:
    """Compact, key-sorted JSON used for hashing"""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def content_hash(data: Any, salt: str = "") -> str:
    return hashlib.sha256((canonical_json(data) + salt).encode("utf-8")).hexdigest()


def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


class FileValidator:
    """Utility class for validating input files"""

    @staticmethod
    def require_file(file_path: str):
        if not os.path.isfile(file_path):
            raise InvalidInputError(f"File not found: {file_path}")

    @staticmethod
    def load_json(file_path: str) -> Any:
        """
        Read a JSON file

        Args:
            file_path: Path to the file

        Returns:
            Parsed JSON value
        """
        FileValidator.require_file(file_path)
        try:
            with open(file_path, "r") as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidInputError(f"Malformed JSON in {file_path}: {e}") from e

    @staticmethod
    def is_valid_json(file_path: str) -> bool:
        try:
            FileValidator.load_json(file_path)
            return True
        except InvalidInputError:
            return False


class ReportWriter:
    """Utility class for writing reports"""

    @staticmethod
    def dumps(data: Any) -> str:
        return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @staticmethod
    def write_json(data: Any, output_path: str):
        """
        Write JSON with sorted keys and a trailing newline

        Args:
            data: JSON-serializable value
            output_path: Destination file
        """
        _ensure_parent(output_path)
        with open(output_path, "w", encoding="utf-8") as f:
            f.write(ReportWriter.dumps(data))

    @staticmethod
    def write_csv(header: Sequence[str], rows: Sequence[Sequence[Any]], output_path: str):
        """
        Write a CSV projection of a report

        Args:
            header: Column names
            rows: Row values
            output_path: Destination file
        """
        _ensure_parent(output_path)
        with open(output_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow(row)


class ArrangementFile:
    """{"family", "t", "k", "normals"} interchange files"""

    @staticmethod
    def to_dict(family: str, t: int, k: int, normals: Sequence[Sequence[int]]) -> Dict[str, Any]:
        return {"family": family, "t": int(t), "k": int(k), "normals": [list(map(int, n)) for n in normals]}

    @staticmethod
    def write(output_path: str, family: str, t: int, k: int, normals: Sequence[Sequence[int]]):
        ReportWriter.write_json(ArrangementFile.to_dict(family, t, k, normals), output_path)

    @staticmethod
    def parse(data: Any) -> Tuple[str, int, int, List[List[int]]]:
        """
        Validate the fields of an arrangement file

        Returns:
            (family, t, k, normals)
        """
        if not isinstance(data, dict):
            raise InvalidInputError("Arrangement file must contain a JSON object")
        missing = [key for key in ("family", "k", "normals") if key not in data]
        if missing:
            raise InvalidInputError(f"Arrangement file is missing {', '.join(missing)}")
        family = data["family"]
        if family not in ("M", "Mprime", "Braid"):
            raise InvalidInputError(f"Unknown family in arrangement file: {family}")
        try:
            k = int(data["k"])
            t = int(data.get("t", 1))
            normals = [[int(x) for x in n] for n in data["normals"]]
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"Arrangement file has non-integer entries: {e}") from e
        if any(len(n) != k for n in normals):
            raise InvalidInputError(f"Every normal must have length k={k}")
        return family, t, k, normals

    @staticmethod
    def read(file_path: str) -> Tuple[str, int, int, List[List[int]]]:
        return ArrangementFile.parse(FileValidator.load_json(file_path))


class ConfigurationFile:
    """{"k", "points": [[num_re, den_re, num_im, den_im], ...]} files"""

    @staticmethod
    def to_dict(rows: Sequence[Sequence[int]]) -> Dict[str, Any]:
        return {"k": len(rows), "points": [list(map(int, r)) for r in rows]}

    @staticmethod
    def write(output_path: str, rows: Sequence[Sequence[int]]):
        ReportWriter.write_json(ConfigurationFile.to_dict(rows), output_path)

    @staticmethod
    def read(file_path: str) -> List[List[int]]:
        """
        Read point rows from a configuration file

        Returns:
            Rows [num_re, den_re, num_im, den_im]
        """
        data = FileValidator.load_json(file_path)
        if not isinstance(data, dict) or "points" not in data:
            raise InvalidInputError("Configuration file must have a points list")
        try:
            rows = [[int(x) for x in row] for row in data["points"]]
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"Configuration file has non-integer entries: {e}") from e
        if "k" in data and int(data["k"]) != len(rows):
            raise InvalidInputError(f"k={data['k']} but {len(rows)} points given")
        return rows


class ComplexFile:
    """Cells as sign strings plus sparse boundary triplets"""

    @staticmethod
    def write(output_path: str, data: Dict[str, Any]):
        ReportWriter.write_json(data, output_path)
