"""Data models for the application."""

import sys
from dataclasses import dataclass, field
from typing import Dict, Optional

from rich.console import Console
from rich.table import Table


@dataclass
class RunSummary:
    """Summary statistics for one command-line run."""

    command: str
    """Subcommand that ran."""

    cells: int = 0
    """Number of evaluated (T, B) cells or points."""

    entangled: Dict[str, int] = field(default_factory=dict)
    """Entangled cell count per witness id."""

    output_path: Optional[str] = None
    """File written, if any."""

    duration_seconds: float = 0.0
    """Wall-clock duration of the run in seconds."""

    warnings: int = 0
    """Recoverable conditions logged during the run."""

    def get_entangled_fraction(self, witness_id: str) -> float:
        """
        Fraction of cells flagged entangled by one witness, in percent.

        Returns
        -------
        float
            Between 0 and 100, or 0 if no cells were evaluated
        """
        if self.cells == 0:
            return 0.0
        return 100.0 * self.entangled.get(witness_id, 0) / self.cells

    def build_table(self) -> Table:
        """Rich table with the run statistics."""
        table = Table(title=f"{self.command.upper()} SUMMARY", show_header=False)
        table.add_column("item", style="bold")
        table.add_column("value", justify="right")
        table.add_row("Cells", str(self.cells))
        for witness_id, count in sorted(self.entangled.items()):
            table.add_row(
                f"Entangled ({witness_id})",
                f"{count} ({self.get_entangled_fraction(witness_id):.1f}%)",
            )
        table.add_row("Warnings", str(self.warnings))
        table.add_row("Output", self.output_path or "stdout")
        table.add_row("Duration", f"{self.duration_seconds:.2f}s")
        return table

    def print_summary(self, console: Optional[Console] = None) -> None:
        """
        Print the run summary table to stderr.

        Examples
        --------
        >>> summary = RunSummary(command="sweep", cells=100, entangled={"energy": 12})
        >>> summary.print_summary()
        """
        (console or Console(file=sys.stderr)).print(self.build_table())

    def __str__(self) -> str:
        return (
            f"RunSummary(command={self.command}, cells={self.cells}, "
            f"entangled={self.entangled}, output={self.output_path})"
        )
