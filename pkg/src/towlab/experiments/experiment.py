import time

from ..analysis.utilities import (create_result_filename, default_output_dir, metadata_to_json,
                                  sidecar_path, table_to_csv)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOT_CONVERGED = 2
EXIT_UNRELIABLE = 3


class Experiment:
    """
    Parent class for the towlab commands.

    An experiment is configured from a RunConfig, runs its numerics into ``self.data``
    (a DataFrame) and ``self.results`` (a dictionary), saves both (CSV + JSON sidecar)
    and analyzes them into an exit status. Child classes implement ``run`` and usually
    ``_update_notes`` and ``analyze``.

    Attributes:
        :config (RunConfig): Resolved configuration
        :save_dir (str): Output directory ($TOWLAB_OUTPUT_DIR or ./towlab_results unless configured)
        :verbose (bool): Print progress
        :data (pd.DataFrame): Main result table
        :results (dict): Scalar results, written to the JSON sidecar
        :metadata (dict): Configuration plus results, updated before saving
        :status (int): Exit status, 0 unless ``analyze`` finds a problem
        :extra_tables (dict): Additional named tables saved next to the main one
    """
    mtype = None
    filename = None
    data = None

    def __init__(self, config):
        self.config = config
        self.save_dir = config.output_dir or default_output_dir()
        self.verbose = config.verbose
        self.notes = config.notes
        self.results = {}
        self.extra_tables = {}
        self.files = []
        self.status = EXIT_OK
        self.history = []
        self._update_metadata()

    def _print(self, message):
        if self.verbose:
            print(message)

    def _update_metadata(self):
        """
        Update metadata dictionary with the configuration and the current results.
        Should be called after running and before saving.
        """
        params = {key: value for key, value in self.config.as_dict().items()
                  if key not in ('output_dir', 'verbose')}
        self.metadata = {'mtype': self.mtype, **params, **self.results, 'status': self.status}

    def _update_notes(self):
        """
        Does nothing, overwrite in child class to tag saved files with the run parameters.
        """
        pass

    def _update_history(self):
        self.history.append(dict(self.metadata))

    def run(self):
        raise AttributeError("run() must be defined in the child class specific to a command")

    def save(self):
        """
        Save the result table(s) to CSV and the metadata to a JSON sidecar.

        Filenames are built from the measurement type and notes, so the same configuration
        overwrites its previous output.
        """
        self._update_notes()
        self._update_metadata()
        if self.data is None:
            self._print("No data to save. Run the experiment first.")
            return []
        self.filename = create_result_filename(self.save_dir, self.mtype, self.notes)
        self.files = [table_to_csv(self.data, self.filename)]
        for name, table in self.extra_tables.items():
            path = create_result_filename(self.save_dir, f"{self.mtype}_{name}", self.notes)
            self.files.append(table_to_csv(table, path))
        self.files.append(metadata_to_json(self.metadata, sidecar_path(self.filename)))
        self._print(f"Results saved to {self.filename}")
        return self.files

    def analyze(self):
        """
        Placeholder for command specific checks. Sets and returns ``self.status``.
        """
        return self.status

    def run_experiment(self):
        """
        Execute the complete workflow:
        1. Run the numerics
        2. Analyze the results into an exit status
        3. Save results
        4. Update history with metadata

        Returns:
            int: Exit status (0 ok, 2 non-convergence, 3 unreliable statistics).
        """
        self._print(f"Running experiment for {self.mtype}...")
        start = time.time()
        self.run()
        self._print(f"Run complete in {time.time() - start:.2f} s.")
        self.analyze()
        self.save()
        self._update_history()
        self._print("Experiment complete.")
        return self.status
