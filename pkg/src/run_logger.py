import json
import os
from datetime import datetime
from typing import Dict, List, Optional


class RunLogger:
    """
    JSON run history, one daily file per day.
    Every CLI command appends one record with its parameters and outcome.
    """

    def __init__(self, log_directory: str = "logs/run_logs"):
        """
        Initialize RunLogger.

        Args:
            log_directory: Directory to store log files (relative to the project root)
        """
        self.project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        self.log_directory = (log_directory if os.path.isabs(log_directory)
                              else os.path.join(self.project_root, log_directory))
        self._ensure_log_directory()

    def _ensure_log_directory(self):
        """Create log directory if it doesn't exist."""
        if not os.path.exists(self.log_directory):
            os.makedirs(self.log_directory)
            print(f"📁 Created log directory: {self.log_directory}")

    def _get_daily_log_filename(self, date: Optional[datetime] = None) -> str:
        """
        Daily log filename, format runs_YYYY_MM_DD.json

        Args:
            date: Date for the log file (uses current date if None)
        """
        if date is None:
            date = datetime.now()
        return os.path.join(self.log_directory, f"runs_{date.strftime('%Y_%m_%d')}.json")

    def _read_daily_log(self, filename: str) -> List[Dict]:
        if os.path.exists(filename):
            try:
                with open(filename, 'r', encoding='utf-8') as f:
                    return json.load(f)
            except json.JSONDecodeError:
                print(f"⚠️ Warning: Could not parse {filename}, creating new log")
                return []
        return []

    def _write_daily_log(self, filename: str, runs: List[Dict]):
        with open(filename, 'w', encoding='utf-8') as f:
            json.dump(runs, f, indent=4, ensure_ascii=False)

    def log_run(self, command: str, parameters: Dict, exit_code: int, duration: float,
                headline: Optional[Dict] = None, message: str = "") -> Dict:
        """
        Append one command record to today's log.

        Args:
            command: CLI command name
            parameters: Parsed arguments (JSON-serializable values)
            exit_code: Process exit code
            duration: Wall time in seconds
            headline: Key numbers of the run (e.g. mu, lambda, pass counts)
            message: Error or status message

        Returns:
            Dict: The stored record
        """
        now = datetime.now()
        record = {
            "run_id": f"{command}_{now.strftime('%H%M%S_%f')}",
            "command": command,
            "time": now.isoformat(),
            "time_display": now.strftime("%Y-%m-%d %H:%M:%S"),
            "parameters": {key: value for key, value in parameters.items() if value is not None},
            "status": "OK" if exit_code == 0 else "FAILED",
            "exit_code": exit_code,
            "duration_seconds": round(duration, 3),
            "headline": headline or {},
            "message": message,
        }
        filename = self._get_daily_log_filename(now)
        runs = self._read_daily_log(filename)
        runs.append(record)
        self._write_daily_log(filename, runs)
        return record

    def get_runs(self, date: Optional[datetime] = None) -> List[Dict]:
        """Records of the given day (today if None)."""
        return self._read_daily_log(self._get_daily_log_filename(date))

    def get_run_statistics(self, date: Optional[datetime] = None) -> Dict:
        """
        Counts per status and command for a day.

        Args:
            date: Date to calculate statistics for (today if None)
        """
        runs = self.get_runs(date)
        if not runs:
            return {"total_runs": 0, "successful_runs": 0, "failed_runs": 0,
                    "success_rate": 0, "by_command": {}}

        by_command: Dict[str, int] = {}
        for run in runs:
            by_command[run["command"]] = by_command.get(run["command"], 0) + 1
        successful = [r for r in runs if r["exit_code"] == 0]
        return {
            "date": (date or datetime.now()).strftime("%Y-%m-%d"),
            "total_runs": len(runs),
            "successful_runs": len(successful),
            "failed_runs": len(runs) - len(successful),
            "success_rate": round(len(successful) / len(runs) * 100, 2),
            "total_duration": round(sum(r.get("duration_seconds", 0) for r in runs), 3),
            "by_command": by_command,
        }


def main():
    """
    Example usage of RunLogger
    """
    logger = RunLogger()
    print("\n📝 Example: Logging a run...")
    logger.log_run("constants", {"N": 5}, 0, 0.42, {"c1": 0.968946})

    stats = logger.get_run_statistics()
    print("\n📊 Today's Statistics:")
    print(f"Total Runs: {stats['total_runs']}")
    print(f"Failed Runs: {stats['failed_runs']}")
    print(f"Success Rate: {stats['success_rate']}%")


if __name__ == "__main__":
    main()
