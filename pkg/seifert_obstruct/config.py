from __future__ import annotations

import os
from pathlib import Path
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

FORMAT_ENV = "SEIFERT_OBSTRUCT_FORMAT"

DEFAULT_MILNOR_CAP = 6
DEFAULT_MAGNUS_CAP = 8
DEFAULT_CUTOFF = 2000

Command = Literal["sfs", "link", "obstruct", "examples", "schema"]


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="ignore", frozen=True)

    command: Command
    notation: Optional[str] = None
    catalog_name: Optional[str] = None
    parameters: Dict[str, str] = Field(default_factory=dict)
    json_path: Optional[Path] = None
    example: Optional[str] = None
    output_format: Literal["text", "json"] = "text"
    milnor_cap: int = Field(default=DEFAULT_MILNOR_CAP, ge=2)
    magnus_cap: int = Field(default=DEFAULT_MAGNUS_CAP, ge=1)
    cutoff: int = Field(default=DEFAULT_CUTOFF, ge=1)

    @model_validator(mode="after")
    def one_input_source(self) -> "RunConfig":
        sources: List[str] = [
            name
            for name, value in (
                ("notation", self.notation),
                ("catalog", self.catalog_name),
                ("json", self.json_path),
                ("example", self.example),
            )
            if value is not None
        ]
        if self.command in ("sfs", "link", "obstruct") and len(sources) != 1:
            raise ValueError(f"{self.command} needs exactly one input source, got {sources or 'none'}")
        if self.command == "examples" and sources != ["example"]:
            raise ValueError("examples needs an example name")
        if self.milnor_cap > self.magnus_cap + 1:
            raise ValueError(f"milnor cap {self.milnor_cap} needs a Magnus degree cap of at least {self.milnor_cap - 1}")
        return self

    @classmethod
    def from_env(cls, **values) -> "RunConfig":
        """Build a configuration; the output format falls back to SEIFERT_OBSTRUCT_FORMAT."""
        if values.get("output_format") is None:
            values["output_format"] = os.getenv(FORMAT_ENV, "text").strip().lower() or "text"
        return cls(**values)
