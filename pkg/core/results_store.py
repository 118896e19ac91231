"""
Results Store
SQLite persistence for batch runs and their solve reports.
"""

import json
import sqlite3
from contextlib import contextmanager
from datetime import datetime
from typing import Dict, List, Optional

from config.settings import Settings
from utils.logger import setup_logger

logger = setup_logger(__name__)


class ResultsStore:
    """Manages the SQLite database of solver runs."""

    def __init__(self, db_path: str = None):
        """
        Initialize the results store.

        Args:
            db_path: Path to SQLite database file
        """
        self.db_path = db_path or Settings.RESULTS_DB_PATH
        self.init_database()
        logger.info(f"Results store initialized at {self.db_path}")

    @contextmanager
    def get_connection(self):
        """Context manager for database connections."""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        try:
            yield conn
            conn.commit()
        except Exception as e:
            conn.rollback()
            logger.error(f"Database error: {e}")
            raise
        finally:
            conn.close()

    def init_database(self):
        """Initialize database schema."""
        with self.get_connection() as conn:
            cursor = conn.cursor()

            cursor.execute(
                """
                CREATE TABLE IF NOT EXISTS runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    started_at TEXT NOT NULL,
                    source TEXT NOT NULL,
                    config TEXT
                )
            """
            )

            cursor.execute(
                """
                CREATE TABLE IF NOT EXISTS reports (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER NOT NULL,
                    line_number INTEGER NOT NULL,
                    operator TEXT NOT NULL,
                    status TEXT NOT NULL,
                    solutions TEXT,
                    diagnostics TEXT,
                    created_at TEXT DEFAULT CURRENT_TIMESTAMP,
                    FOREIGN KEY (run_id) REFERENCES runs(id)
                )
            """
            )

            cursor.execute(
                """
                CREATE INDEX IF NOT EXISTS idx_reports_run
                ON reports(run_id)
            """
            )

    def start_run(self, source: str, config: dict = None) -> int:
        """
        Record the start of a solve or batch run.

        Args:
            source: Operator text or batch file path
            config: SolveConfig as a dictionary

        Returns:
            int: ID of the new run
        """
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute(
                "INSERT INTO runs (started_at, source, config) VALUES (?, ?, ?)",
                (datetime.now().isoformat(), source, json.dumps(config) if config else None),
            )
            return cursor.lastrowid

    def add_report(self, run_id: int, line_number: int, operator: str, report: dict) -> int:
        """
        Store one report of a run.

        Args:
            run_id: Run the report belongs to
            line_number: 1-based input line (1 for a single solve)
            operator: Operator text as given
            report: Report dictionary with status, solutions and diagnostics

        Returns:
            int: ID of inserted report
        """
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute(
                """
                INSERT INTO reports
                (run_id, line_number, operator, status, solutions, diagnostics)
                VALUES (?, ?, ?, ?, ?, ?)
            """,
                (
                    run_id,
                    line_number,
                    operator,
                    report["status"],
                    json.dumps(report.get("solutions", [])),
                    json.dumps(report.get("diagnostics", {})),
                ),
            )
            return cursor.lastrowid

    def get_reports(self, run_id: int, status: str = None) -> List[Dict]:
        """Reports of a run in line order, optionally filtered by status."""
        with self.get_connection() as conn:
            cursor = conn.cursor()
            query = "SELECT * FROM reports WHERE run_id = ?"
            params = [run_id]
            if status:
                query += " AND status = ?"
                params.append(status)
            query += " ORDER BY line_number"
            cursor.execute(query, params)

            reports = []
            for row in cursor.fetchall():
                report = dict(row)
                report["solutions"] = json.loads(report["solutions"]) if report["solutions"] else []
                report["diagnostics"] = json.loads(report["diagnostics"]) if report["diagnostics"] else {}
                reports.append(report)
            return reports

    def get_status_counts(self, run_id: int) -> Dict[str, int]:
        """Count of reports grouped by status."""
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute(
                """
                SELECT status, COUNT(*) as count
                FROM reports
                WHERE run_id = ?
                GROUP BY status
            """,
                (run_id,),
            )
            return {row["status"]: row["count"] for row in cursor.fetchall()}

    def get_run(self, run_id: int) -> Optional[Dict]:
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute("SELECT * FROM runs WHERE id = ?", (run_id,))
            row = cursor.fetchone()
            if row:
                run = dict(row)
                run["config"] = json.loads(run["config"]) if run["config"] else None
                return run
            return None

    def get_latest_runs(self, limit: int = 20) -> List[Dict]:
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute("SELECT * FROM runs ORDER BY id DESC LIMIT ?", (limit,))
            return [dict(row) for row in cursor.fetchall()]
