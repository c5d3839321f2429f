"""
Export utilities for solver statistics (per-node table sizes, corpus summaries).
"""
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Union

import pandas as pd

from utils.config_loader import config_loader
from utils.custom_exceptions import ConfigurationError
from utils.logger import logger

TABLE_STATS_COLUMNS = ['root_vertex', 'budget_k', 'node', 'kind', 'bag_size', 'keys', 'finite_entries']


class ExportUtils:
    """Writes solver statistics to CSV through pandas."""

    def __init__(self, output_dir: Optional[Union[str, Path]] = None):
        self.export_settings = self._get_export_settings()
        base = output_dir or self.export_settings['output_dir']
        self.output_dir = Path(base)
        if not self.output_dir.is_absolute():
            self.output_dir = Path(__file__).resolve().parent.parent / self.output_dir

    def _get_export_settings(self) -> Dict[str, Any]:
        settings = {
            'output_dir': 'output/exports',
            'csv_encoding': 'utf-8',
        }
        try:
            settings.update(config_loader.get_custom_config('EXPORT_SETTINGS', default={}))
        except ConfigurationError as e:
            logger.debug(f"Could not load export settings from config: {e}")
        return settings

    def table_stats_frame(self, node_stats: Iterable[Mapping[str, Any]]) -> pd.DataFrame:
        """One row per (root vertex, budget, decomposition node) table."""
        frame = pd.DataFrame(list(node_stats), columns=TABLE_STATS_COLUMNS)
        if frame.empty:
            return frame
        return frame.sort_values(['budget_k', 'root_vertex', 'node'], kind='mergesort').reset_index(drop=True)

    def summarize_table_stats(self, frame: pd.DataFrame) -> pd.DataFrame:
        """Largest and total key counts per (root vertex, budget) run."""
        if frame.empty:
            return pd.DataFrame(columns=['root_vertex', 'budget_k', 'max_keys', 'total_keys', 'nodes'])
        grouped = frame.groupby(['root_vertex', 'budget_k'], sort=True)
        return grouped.agg(max_keys=('keys', 'max'), total_keys=('keys', 'sum'),
                           nodes=('node', 'count')).reset_index()

    def write_to_csv_safe(self, df: pd.DataFrame, filepath: Union[str, Path], **kwargs) -> bool:
        """
        Write a DataFrame to CSV, creating parent directories.

        Returns:
            True if successful, False otherwise
        """
        output_path = Path(filepath)
        try:
            output_path.parent.mkdir(parents=True, exist_ok=True)
            csv_params = {'index': False, 'encoding': self.export_settings.get('csv_encoding', 'utf-8')}
            csv_params.update(kwargs)
            df.to_csv(output_path, **csv_params)
        except OSError as e:
            logger.error(f"CSV export failed for {output_path}: {e}")
            return False
        logger.info(f"Exported {len(df)} rows to CSV: {output_path}")
        return True

    def export_table_stats(self, node_stats: Iterable[Mapping[str, Any]],
                           filepath: Optional[Union[str, Path]] = None) -> Optional[Path]:
        """Write per-node table statistics; a timestamped file under output_dir by default."""
        frame = self.table_stats_frame(node_stats)
        if filepath is None:
            stamp = datetime.now().strftime('%Y%m%d_%H%M%S')
            filepath = self.output_dir / f"table_stats_{stamp}.csv"
        return Path(filepath) if self.write_to_csv_safe(frame, filepath) else None


export_utils = ExportUtils()
