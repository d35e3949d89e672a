"""
Arrangement manager for comarr
Loads arrangement files and keeps their lattices in memory and on disk
"""

import json
import logging
import os
from dataclasses import dataclass
from typing import Dict, List, Optional

from .. import __version__
from ..config import Settings, get_settings
from ..exceptions import InvalidInputError
from ..utils.io_formats import ArrangementFile, ReportWriter, content_hash
from .arrangements import HyperplaneSet, build, spec_for
from .lattice import IntersectionLattice, build_lattice, check_size, lattice_from_json, lattice_to_json

logger = logging.getLogger(__name__)


@dataclass
class LoadedArrangement:
    family: str
    t: int
    k: int
    h: HyperplaneSet

    def to_dict(self) -> dict:
        return ArrangementFile.to_dict(self.family, self.t, self.k, self.h.normals)

    @property
    def key(self) -> str:
        """SHA-256 of the canonical arrangement JSON plus the tool version"""
        return content_hash(self.to_dict(), salt=__version__)


class ArrangementManager:
    """
    Manager class for arrangements and their intersection lattices
    """

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize arrangement manager

        Args:
            settings: Settings to use (process-wide settings when None)
        """
        self.settings = settings or get_settings()
        self.loaded_lattices: Dict[str, IntersectionLattice] = {}
        logger.debug(f"Lattice cache at {self.settings.cache_path}")

    def build_arrangement(self, family: str, t: Optional[int], k: int) -> LoadedArrangement:
        spec = spec_for(family, t, k)
        return LoadedArrangement(spec.family.value, spec.t, spec.k, build(spec))

    def load_arrangement(self, file_path: str) -> LoadedArrangement:
        """
        Read an arrangement file

        Args:
            file_path: JSON arrangement file

        Returns:
            LoadedArrangement with canonical normals
        """
        family, t, k, normals = ArrangementFile.read(file_path)
        try:
            h = HyperplaneSet.from_normals(k, normals)
        except ValueError as e:
            raise InvalidInputError(f"Bad arrangement in {file_path}: {e}") from e
        logger.info(f"✅ Loaded {family} arrangement: k={k}, {len(h)} hyperplanes")
        return LoadedArrangement(family, t, k, h)

    def save_arrangement(self, arrangement: LoadedArrangement, output_path: str):
        ArrangementFile.write(output_path, arrangement.family, arrangement.t, arrangement.k, arrangement.h.normals)

    def _cache_file(self, key: str) -> str:
        return str(self.settings.cache_path / "lattices" / f"{key}.json")

    def lattice(self, arrangement: LoadedArrangement, force: bool = False) -> IntersectionLattice:
        """
        Intersection lattice of an arrangement, from memory, disk or a fresh build

        Args:
            arrangement: Loaded arrangement
            force: Override the hyperplane guard

        Returns:
            IntersectionLattice
        """
        check_size(arrangement.h, self.settings.max_hyperplanes, force)
        key = arrangement.key
        if key in self.loaded_lattices:
            return self.loaded_lattices[key]

        path = self._cache_file(key)
        lattice = None
        if os.path.exists(path):
            try:
                with open(path, "r") as f:
                    lattice = lattice_from_json(json.load(f)["lattice"])
                logger.info(f"✅ Lattice cache hit {key[:12]}")
            except (OSError, ValueError, KeyError) as e:
                logger.warning(f"⚠️ Ignoring unreadable cache file {path}: {e}")

        if lattice is None:
            lattice = build_lattice(arrangement.h, self.settings.max_hyperplanes, force)
            try:
                ReportWriter.write_json({"arrangement": arrangement.to_dict(), "lattice": lattice_to_json(lattice)}, path)
            except OSError as e:
                logger.warning(f"⚠️ Could not write lattice cache {path}: {e}")

        self.loaded_lattices[key] = lattice
        return lattice

    def list_cached(self) -> List[str]:
        folder = self.settings.cache_path / "lattices"
        if not folder.exists():
            return []
        return sorted(p.stem for p in folder.glob("*.json"))

    def unload(self, arrangement: LoadedArrangement):
        """Drop a lattice from memory; the disk cache is kept"""
        self.loaded_lattices.pop(arrangement.key, None)


# Global arrangement manager instance
_arrangement_manager = None


def get_arrangement_manager() -> ArrangementManager:
    global _arrangement_manager
    if _arrangement_manager is None:
        _arrangement_manager = ArrangementManager()
    return _arrangement_manager


def reset_arrangement_manager():
    global _arrangement_manager
    _arrangement_manager = None
