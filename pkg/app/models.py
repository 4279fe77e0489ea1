import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from app.utils.bundles import BundleClass, chern_character
from app.utils.errors import CalculusError, WorkspaceError
from app.utils.exact_core import ChowClass
from app.utils.expression import CONSTANTS, SIGNATURES
from app.utils.ktheory import KClass, ch_map
from app.utils.riemann_roch import (
    CurveContext,
    SurfaceContext,
    TrackedBundle,
    noether_chi,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class Workspace:
    """Named bundles, surfaces and curves sharing one ambient P^n.

    The document form is
    {version, ambient, bundles: [{name, line | sum-of-lines | rank + chern [+ kclass]}],
     surfaces: [{name, basis, pairing, canonical, c2}], curves: [{name, genus}]}.
    """

    ambient: int
    bundles: Dict[str, TrackedBundle] = field(default_factory=dict)
    surfaces: Dict[str, SurfaceContext] = field(default_factory=dict)
    curves: Dict[str, CurveContext] = field(default_factory=dict)

    @classmethod
    def empty(cls, ambient: int) -> "Workspace":
        return cls(ambient=ambient)

    @classmethod
    def load(cls, path: str, ambient: Optional[int] = None) -> "Workspace":
        """Read a workspace file; ambient overrides the document's value."""
        if not os.path.exists(path):
            raise WorkspaceError(f"workspace file not found: {path}")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                document = json.load(f)
        except json.JSONDecodeError as e:
            raise WorkspaceError(f"workspace {path} is not valid JSON: {e}")
        workspace = cls.from_json(document, ambient)
        logger.info("loaded workspace %s: %d bundles, %d surfaces, %d curves",
                    path, len(workspace.bundles), len(workspace.surfaces), len(workspace.curves))
        return workspace

    @classmethod
    def from_json(cls, document: Dict[str, Any], ambient: Optional[int] = None) -> "Workspace":
        if not isinstance(document, dict):
            raise WorkspaceError("a workspace document is a JSON object")
        version = document.get("version")
        if version != SCHEMA_VERSION:
            raise WorkspaceError(f"unsupported workspace version {version!r}; expected {SCHEMA_VERSION}")
        n = ambient if ambient is not None else document.get("ambient")
        if not isinstance(n, int) or n < 1:
            raise WorkspaceError(f"workspace ambient must be a positive integer, got {n!r}")

        workspace = cls(ambient=n)
        for entry in document.get("bundles", []):
            name = cls._checked_name(entry, workspace)
            try:
                workspace.bundles[name] = cls._bundle_from_entry(entry, n)
            except CalculusError as e:
                raise WorkspaceError(f"bundle {name!r}: {e}")
        for entry in document.get("surfaces", []):
            name = cls._checked_name(entry, workspace)
            try:
                surface = SurfaceContext(
                    tuple(entry["basis"]), tuple(tuple(r) for r in entry["pairing"]),
                    tuple(entry["canonical"]), int(entry["c2"]), name=name,
                )
                noether_chi(surface)
            except KeyError as e:
                raise WorkspaceError(f"surface {name!r} is missing {e}")
            except CalculusError as e:
                raise WorkspaceError(f"surface {name!r}: {e}")
            workspace.surfaces[name] = surface
        for entry in document.get("curves", []):
            name = cls._checked_name(entry, workspace)
            try:
                workspace.curves[name] = CurveContext(entry["genus"], name=name)
            except KeyError:
                raise WorkspaceError(f"curve {name!r} is missing 'genus'")
            except CalculusError as e:
                raise WorkspaceError(f"curve {name!r}: {e}")
        return workspace

    @staticmethod
    def _checked_name(entry: Dict[str, Any], workspace: "Workspace") -> str:
        name = entry.get("name") if isinstance(entry, dict) else None
        if not isinstance(name, str) or not name.isidentifier():
            raise WorkspaceError(f"every workspace entry needs an identifier name, got {name!r}")
        if name in CONSTANTS or name in SIGNATURES:
            raise WorkspaceError(f"name {name!r} is reserved by the expression language")
        if name in workspace.bundles or name in workspace.surfaces or name in workspace.curves:
            raise WorkspaceError(f"duplicate workspace label {name!r}")
        return name

    @staticmethod
    def _bundle_from_entry(entry: Dict[str, Any], n: int) -> TrackedBundle:
        if "line" in entry:
            return TrackedBundle.line(n, int(entry["line"]))
        if "sum-of-lines" in entry:
            degrees: List[int] = [int(d) for d in entry["sum-of-lines"]]
            if not degrees:
                raise WorkspaceError("'sum-of-lines' needs at least one degree")
            lines = [TrackedBundle.line(n, d) for d in degrees]
            return lines[0].sum(*lines[1:])
        if "chern" in entry:
            chern = ChowClass.from_json(entry["chern"])
            if chern.ambient != n:
                raise WorkspaceError(f"Chern data has {chern.ambient + 1} parts but the ambient is P^{n}")
            bundle = BundleClass(n, int(entry.get("rank", 1)), chern)
            kclass = KClass(n, tuple(int(c) for c in entry["kclass"])) if entry.get("kclass") else None
            if kclass is not None and ch_map(kclass) != chern_character(bundle):
                raise WorkspaceError(f"K-class {kclass} does not have the Chern character of the given Chern data")
            return TrackedBundle(bundle, kclass)
        raise WorkspaceError("a bundle entry needs one of 'line', 'sum-of-lines' or 'chern'")

    def to_json(self) -> Dict[str, Any]:
        bundles = []
        for name, tracked in self.bundles.items():
            entry = {"name": name, "rank": tracked.bundle.rank, "chern": tracked.bundle.chern.to_json()}
            if tracked.tracked:
                entry["kclass"] = list(tracked.kclass.coeffs)
            bundles.append(entry)
        return {
            "version": SCHEMA_VERSION,
            "ambient": self.ambient,
            "bundles": bundles,
            "surfaces": [s.to_json() for s in self.surfaces.values()],
            "curves": [c.to_json() for c in self.curves.values()],
        }

    def save(self, path: str):
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_json(), f, indent=2)
