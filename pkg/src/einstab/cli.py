"""
Module for the einstab command-line interface: configuration, analysis runs, parameter sweeps, and
rendering of reports as markdown, rst, json, or csv.

Usage:
    einstab analyze aloff-wallach --p 0 --q 1 --branch CR
    einstab analyze stiefel --n 5 --format markdown
    einstab analyze spectra --case hyperquadric --m 3
    einstab sweep aloff-wallach --range 1:20 --progress
    einstab report --format markdown
    einstab report --input report.json --format rst --output report.rst
"""
import argparse
import functools
import json
import os
import re
import sys
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np
import pandas as pd
import ruamel.yaml as yaml
import sympy
from hdmf_docutils.doctools.output import PrintHelper
from hdmf_docutils.doctools.rst import RSTDocument

from ._version import __version__
from .aloff_wallach import BRANCHES, aw_instability_report, aw_pairs, branch_interval
from .errors import InvariantViolation, SolverError
from .homspace import EINSTEIN_TOL, StabilityVerdict, certify_einstein
from .liecore import validate_pq
from .nikonorov import nik_instability, nik_solve
from .spectra import CASE_IDS, case_study, load_curated_cases
from .stiefel import stiefel_einstein, stiefel_instability

COMMANDS = ('analyze', 'sweep', 'report')

ANALYZE_SPACES = ('aloff-wallach', 'stiefel', 'nikonorov', 'spectra', 'low-dimensional')
SWEEP_SPACES = ('aloff-wallach', 'stiefel', 'hyperquadric', 'grassmannian', 'sp-su')
FORMATS = ('json', 'csv', 'markdown', 'rst')

CONFIG_KEYS = ('space', 'p', 'q', 'branch', 'n', 'm', 'k', 'case', 'tol', 'format', 'output', 'threads',
               'qmin', 'qmax', 'nmin', 'nmax', 'mmin', 'mmax', 'pmin', 'pmax', 'kmin', 'kmax', 'progress')
"""Keys accepted in a configuration file"""

ECHO_EXCLUDED = ('output', 'threads', 'progress')
"""Keys that do not change the content of a report and are therefore not echoed"""

PARAMETER_KEYS = ('p', 'q', 'branch', 'n', 'm', 'k', 'case', 'axis')

SWEEP_RANGE_KEYS = OrderedDict([
    ('aloff-wallach', ('qmin', 'qmax')),
    ('stiefel', ('nmin', 'nmax')),
    ('hyperquadric', ('mmin', 'mmax')),
    ('grassmannian', ('pmin', 'pmax')),
    ('sp-su', ('kmin', 'kmax')),
])

CSV_COLUMNS = (('space',) + PARAMETER_KEYS +
               ('c', 'einstein_constant', 'discriminant', 'f(c)', 'second_variation', 'eigenvalue', 'threshold',
                'verdict', 'coindex_lower_bound', 'error'))

EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_INVARIANT = 4

THREADS_ENV = 'EINSTAB_THREADS'

MARKDOWN_DIGITS = 6

_FLOAT_PATTERN = re.compile(r'^[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?$|^[-+]?inf$|^nan$')
_RATIONAL_PATTERN = re.compile(r'^-?\d+/\d+$')
_TEXT_ESCAPE = "'"
"""Prefix of JSON strings that are text although they read as numbers, or that start with the prefix"""


class AnalysisConfig(NamedTuple):
    """Named tuple with the validated settings of one einstab invocation"""

    command: str
    space: str = None
    p: int = None
    q: int = None
    branch: str = None
    n: int = None
    m: int = None
    k: int = None
    case: str = None
    tol: float = EINSTEIN_TOL
    format: str = None
    output: str = None
    threads: int = None
    qmin: int = 1
    qmax: int = 20
    nmin: int = 3
    nmax: int = 20
    mmin: int = 3
    mmax: int = 20
    pmin: int = 2
    pmax: int = 10
    kmin: int = 4
    kmax: int = 20
    progress: bool = False
    input: str = None

    @staticmethod
    def create(command: str, **kwargs):
        """
        Create a config with defaults filled in.

        :raises ValueError: If a setting is unknown or out of range
        """
        unknown = sorted(set(kwargs) - set(AnalysisConfig._fields))
        if unknown:
            raise ValueError("unknown configuration keys: %s" % ", ".join(unknown))
        if command not in COMMANDS:
            raise ValueError("unknown command %s, expected one of %s" % (str(command), ", ".join(COMMANDS)))
        settings = {key: value for key, value in kwargs.items() if value is not None}
        if settings.get('format') is None:
            settings['format'] = 'csv' if command == 'sweep' else 'json'
        if settings.get('threads') is None:
            settings['threads'] = int(os.environ.get(THREADS_ENV, os.cpu_count() or 1))
        config = AnalysisConfig(command=command, **settings)
        config.validate()
        return config

    def validate(self):
        """
        :raises ValueError: If the space or a setting does not fit the command
        """
        if self.command == 'analyze' and self.space not in ANALYZE_SPACES:
            raise ValueError("analyze needs a space, one of %s, got %s" % (", ".join(ANALYZE_SPACES),
                                                                         str(self.space)))
        if self.command == 'sweep' and self.space not in SWEEP_SPACES:
            raise ValueError("sweep needs a space, one of %s, got %s" % (", ".join(SWEEP_SPACES), str(self.space)))
        if self.format not in FORMATS:
            raise ValueError("unknown format %s, expected one of %s" % (str(self.format), ", ".join(FORMATS)))
        if self.format == 'rst' and self.output is None:
            raise ValueError("the rst format needs an --output file")
        if self.branch is not None:
            branch_interval(self.branch)
        if not self.tol > 0:
            raise ValueError("tol must be positive, got %s" % str(self.tol))
        if self.threads < 1:
            raise ValueError("threads must be at least 1, got %s" % str(self.threads))
        for low, high in SWEEP_RANGE_KEYS.values():
            if getattr(self, low) > getattr(self, high):
                raise ValueError("%s = %i exceeds %s = %i" % (low, getattr(self, low), high, getattr(self, high)))
        if self.command == 'analyze':
            if self.space == 'aloff-wallach':
                if self.p is None or self.q is None:
                    raise ValueError("aloff-wallach needs --p and --q")
                validate_pq(self.p, self.q)
            elif self.space == 'stiefel' and self.n is None:
                raise ValueError("stiefel needs --n")
            elif self.space == 'spectra' and self.case not in CASE_IDS:
                raise ValueError("spectra needs --case, one of %s, got %s" % (", ".join(CASE_IDS), str(self.case)))
        return True

    def echo(self):
        """OrderedDict with the settings that determine the content of a report"""
        result = OrderedDict([('command', self.command)])
        for key in CONFIG_KEYS:
            value = getattr(self, key)
            if key not in ECHO_EXCLUDED and value is not None:
                result[key] = value
        return result


def load_config(filename: str):
    """
    Load a flat YAML mapping of configuration keys.

    :return: dict with the settings
    :raises ValueError: If the file does not hold a mapping or contains unknown keys
    """
    yaml_loader = yaml.YAML(typ='safe', pure=True)
    with open(filename, 'r') as f:
        settings = yaml_loader.load(f)
    if settings is None:
        return {}
    if not isinstance(settings, dict):
        raise ValueError("configuration file %s must hold a mapping" % filename)
    unknown = sorted(set(settings) - set(CONFIG_KEYS))
    if unknown:
        raise ValueError("unknown configuration keys in %s: %s" % (filename, ", ".join(unknown)))
    return dict(settings)


class Report(NamedTuple):
    """Named tuple with the content of one einstab report"""

    config: OrderedDict
    """Echo of the configuration"""

    results: list
    """List of result records (OrderedDict), see ``make_record``"""

    notes: list
    """List of curated verdict rows (OrderedDict with dimension, label, case, verdict, citation)"""

    version: str = __version__

    def to_json(self):
        """Deterministic JSON text: fixed key order, floats as 17-digit decimal strings, rationals as p/q"""
        content = OrderedDict([
            ('config', self.config),
            ('results', [_record_to_plain(record) for record in self.results]),
            ('notes', self.notes),
            ('version', self.version),
        ])
        return json.dumps(encode_value(content), indent=2) + "\n"

    @staticmethod
    def from_json(text: str):
        """
        Parse a report written by ``to_json``

        :raises ValueError: If the text is not an einstab report
        """
        content = json.loads(text, object_pairs_hook=OrderedDict)
        missing = [key for key in ('config', 'results', 'notes', 'version') if key not in content]
        if missing:
            raise ValueError("not an einstab report, missing %s" % ", ".join(missing))
        content = decode_value(content)
        results = []
        for record in content['results']:
            if record['verdict'] is not None:
                record['verdict'] = StabilityVerdict(**record['verdict'])
            results.append(record)
        return Report(config=content['config'], results=results, notes=content['notes'],
                      version=content['version'])


def _looks_numeric(text: str):
    return bool(_RATIONAL_PATTERN.match(text) or _FLOAT_PATTERN.match(text))


def encode_value(value):
    """
    Convert a value to plain JSON types with floats as '%.17g' strings and sympy Rationals as 'p/q'.
    Text that would read back as a number is prefixed with _TEXT_ESCAPE.
    """
    if value is None or isinstance(value, bool):
        return value
    if isinstance(value, str):
        if _looks_numeric(value) or value.startswith(_TEXT_ESCAPE):
            return _TEXT_ESCAPE + value
        return value
    if isinstance(value, sympy.Rational):
        return "%d/%d" % (value.p, value.q)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    if isinstance(value, dict):
        return OrderedDict((str(key), encode_value(item)) for key, item in value.items())
    if isinstance(value, (list, tuple, np.ndarray)):
        return [encode_value(item) for item in value]
    raise ValueError("cannot encode %s of type %s" % (str(value), type(value).__name__))


def decode_value(value):
    """Inverse of ``encode_value``; lists become tuples except for the top-level results and notes"""
    if isinstance(value, str):
        if value.startswith(_TEXT_ESCAPE):
            return value[len(_TEXT_ESCAPE):]
        if _RATIONAL_PATTERN.match(value):
            numerator, denominator = value.split('/')
            return sympy.Rational(int(numerator), int(denominator))
        if _FLOAT_PATTERN.match(value):
            return float(value)
        return value
    if isinstance(value, dict):
        decoded = OrderedDict((key, decode_value(item)) for key, item in value.items())
        for key in ('results', 'notes'):
            if isinstance(decoded.get(key), tuple):
                decoded[key] = list(decoded[key])
        return decoded
    if isinstance(value, list):
        return tuple(decode_value(item) for item in value)
    return value


def make_record(space: str, parameters: OrderedDict, verdict: StabilityVerdict = None, metric=None,
                einstein_constant=None, citation: str = "", certificate: OrderedDict = None, error: str = None,
                error_type: str = None):
    """Result record of one analyzed metric or case"""
    return OrderedDict([
        ('space', space),
        ('parameters', parameters),
        ('metric', tuple(metric) if metric is not None else None),
        ('einstein_constant', einstein_constant),
        ('verdict', verdict),
        ('citation', citation),
        ('certificate', certificate),
        ('error', error),
        ('error_type', error_type),
    ])


def _record_to_plain(record: OrderedDict):
    plain = OrderedDict(record)
    if plain['verdict'] is not None:
        plain['verdict'] = plain['verdict']._asdict()
    return plain


def _check_tol(residual: float, tol: float, label: str):
    if residual > tol:
        raise InvariantViolation("%s is not Einstein" % label, residual, tol)


def analyze_aloff_wallach(p: int, q: int, branch: str, tol: float = EINSTEIN_TOL):
    """Record for the Einstein metric of N^{pq0} on one branch"""
    verdict = aw_instability_report(p, q, branch, include_n130=True)
    details = verdict.details
    _check_tol(details['einstein_residual'], tol, "N^{%i%i0} %s metric" % (p, q, branch))
    return make_record('aloff-wallach', OrderedDict([('p', p), ('q', q), ('branch', branch)]), verdict=verdict,
                       metric=(details['alpha'], details['beta'], details['gamma'], details['delta']),
                       einstein_constant=details['einstein_constant'], citation=verdict.note)


def analyze_stiefel(n: int, tol: float = EINSTEIN_TOL):
    """Record for the Einstein metric of V_2(R^{n+1})"""
    candidate = certify_einstein(stiefel_einstein(n), tol=tol, label="Stiefel metric for n = %i" % n)
    verdict = stiefel_instability(n)
    return make_record('stiefel', OrderedDict([('n', n)]), verdict=verdict, metric=candidate.metric.scales,
                       einstein_constant=candidate.einstein_constant, citation=verdict.note)


def analyze_nikonorov(tol: float = EINSTEIN_TOL):
    """Records for both Einstein metrics of N^{130} with a = 1, unstable along p2 and p1, respectively"""
    records = []
    for axis, solution in zip((2, 1), nik_solve()):
        certify_einstein(solution, tol=tol, label="N^{130} metric")
        verdict = nik_instability(solution, axis)
        records.append(make_record('nikonorov', OrderedDict([('axis', axis)]), verdict=verdict,
                                   metric=solution.metric.scales, einstein_constant=solution.einstein_constant,
                                   citation=verdict.note))
    return records


def analyze_case(case_id: str, m: int = None, p: int = None, k: int = None):
    """Record for a curated representation-theoretic case study"""
    report = case_study(case_id, m=m, p=p, k=k)
    certificate = OrderedDict([
        ('group', report.group),
        ('subgroup', report.subgroup),
        ('base_dimension', report.base_dimension),
        ('representation', report.representation),
        ('weight', report.weight),
        ('casimir_prime', report.casimir_prime),
        ('casimir', report.casimir),
        ('fiber_constant', report.fiber_constant),
        ('dimension', report.dimension),
    ])
    parameters = OrderedDict([('case', case_id)])
    parameters.update(report.parameters)
    return make_record('spectra', parameters, verdict=report.verdict, einstein_constant=report.einstein_constant,
                       citation=report.citation, certificate=certificate)


def evaluate_point(space: str, parameters: OrderedDict, tol: float = EINSTEIN_TOL):
    """
    Evaluate one analysis point. Solver failures and violated self-checks are recorded in the record.

    :return: List of records
    :raises ValueError: If the parameters are invalid
    """
    try:
        if space == 'aloff-wallach':
            return [analyze_aloff_wallach(parameters['p'], parameters['q'], parameters['branch'], tol=tol)]
        if space == 'stiefel':
            return [analyze_stiefel(parameters['n'], tol=tol)]
        if space == 'nikonorov':
            return analyze_nikonorov(tol=tol)
        if space == 'spectra':
            return [analyze_case(parameters['case'], m=parameters.get('m'), p=parameters.get('p'),
                                 k=parameters.get('k'))]
    except (SolverError, InvariantViolation) as e:
        return [make_record(space, parameters, error=str(e), error_type=type(e).__name__)]
    raise ValueError("unknown space %s" % str(space))


def analysis_points(config: AnalysisConfig):
    """
    Parameter points of an analyze, sweep, or report run in lexicographic order of the parameters

    :return: List of tuples (space, parameters)
    """
    if config.command == 'report':
        points = [('aloff-wallach', OrderedDict([('p', 0), ('q', 1), ('branch', branch)])) for branch in BRANCHES]
        points.append(('stiefel', OrderedDict([('n', 3)])))
        points.append(('nikonorov', OrderedDict()))
        defaults = {'hyperquadric': {'m': 3}, 'grassmannian': {'p': 2}, 'sp-su': {'k': 4}}
        for case_id in CASE_IDS:
            parameters = OrderedDict([('case', case_id)])
            parameters.update(defaults.get(case_id, {}))
            points.append(('spectra', parameters))
        return points
    if config.command == 'analyze':
        if config.space == 'aloff-wallach':
            branches = BRANCHES if config.branch is None else (config.branch,)
            return [('aloff-wallach', OrderedDict([('p', config.p), ('q', config.q), ('branch', branch)]))
                    for branch in branches]
        if config.space == 'stiefel':
            return [('stiefel', OrderedDict([('n', config.n)]))]
        if config.space == 'nikonorov':
            return [('nikonorov', OrderedDict())]
        if config.space == 'spectra':
            parameters = OrderedDict([('case', config.case)])
            for key in ('m', 'p', 'k'):
                if getattr(config, key) is not None:
                    parameters[key] = getattr(config, key)
            return [('spectra', parameters)]
        return []
    # sweep
    if config.space == 'aloff-wallach':
        branches = BRANCHES if config.branch is None else (config.branch,)
        return [('aloff-wallach', OrderedDict([('p', p), ('q', q), ('branch', branch)]))
                for p, q in sorted(aw_pairs(config.qmax)) if q >= config.qmin
                for branch in branches]
    if config.space == 'stiefel':
        return [('stiefel', OrderedDict([('n', n)])) for n in range(config.nmin, config.nmax + 1)]
    key = {'hyperquadric': 'm', 'grassmannian': 'p', 'sp-su': 'k'}[config.space]
    low, high = SWEEP_RANGE_KEYS[config.space]
    return [('spectra', OrderedDict([('case', config.space), (key, value)]))
            for value in range(getattr(config, low), getattr(config, high) + 1)]


def curated_notes():
    """Low-dimensional verdict rows and the 3-Sasakian note from the curated table"""
    curated = load_curated_cases()
    notes = []
    for row in curated['low_dimensional']:
        notes.append(OrderedDict([('dimension', row['dimension']), ('label', row.get('label', "")),
                                  ('case', row['case']), ('verdict', row['verdict']),
                                  ('citation', row['citation'])]))
    notes.append(OrderedDict([('dimension', None), ('label', "3-Sasakian"),
                              ('case', "canonical variation of regular 3-Sasakian fibrations"),
                              ('verdict', StabilityVerdict.S_UNSTABLE),
                              ('citation', curated['notes']['three_sasakian'])]))
    return notes


def run(config: AnalysisConfig, tqdm=None):
    """
    Run all analysis points of a config. Points are evaluated concurrently on up to config.threads
    threads while the records keep the order of ``analysis_points``.

    :param config: The AnalysisConfig
    :param tqdm: Optional tqdm progress bar class to wrap the point iterator
    :return: Report
    :raises ValueError: If a point has invalid parameters
    """
    points = analysis_points(config)
    evaluate = functools.partial(_evaluate_tuple, tol=config.tol)
    with ThreadPoolExecutor(max_workers=config.threads) as executor:
        iterator = executor.map(evaluate, points)
        if tqdm is not None:
            iterator = tqdm(iterator, total=len(points), desc=config.space or config.command)
        results = [record for records in iterator for record in records]
    include_notes = config.command == 'report' or config.space == 'low-dimensional'
    return Report(config=config.echo(), results=results, notes=curated_notes() if include_notes else [])


def _evaluate_tuple(point, tol):
    space, parameters = point
    return evaluate_point(space, parameters, tol=tol)


def sweep(config: AnalysisConfig, tqdm=None):
    """
    Run a parameter sweep

    :return: pandas DataFrame with one row per parameter point, see ``report_table``
    """
    if config.command != 'sweep':
        raise ValueError("sweep needs a sweep config, got %s" % config.command)
    return report_table(run(config, tqdm=tqdm))


def exit_status(report: Report):
    """0 if all records succeeded, EXIT_SOLVER if a solver failed, EXIT_INVARIANT if a self-check failed"""
    error_types = {record['error_type'] for record in report.results if record['error_type'] is not None}
    if 'SolverError' in error_types:
        return EXIT_SOLVER
    if error_types:
        return EXIT_INVARIANT
    return 0


def verify_report(report: Report):
    """
    Re-derive every verdict from its witness

    :raises InvariantViolation: If a stored classification does not follow from its witness
    """
    for record in report.results:
        if record['verdict'] is not None:
            record['verdict'].verify()
    return True


def _cell(value):
    """CSV cell: exact text for numbers, empty for missing values"""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    encoded = encode_value(value)
    if isinstance(encoded, list):
        return " ".join(str(item) for item in encoded)
    return str(encoded)


def report_table(report: Report):
    """
    Flatten the records of a report into a table with the columns CSV_COLUMNS

    :return: pandas DataFrame with string cells
    """
    verify_report(report)
    rows = []
    for record in report.results:
        verdict = record['verdict']
        details = (verdict.details if verdict is not None else None) or {}
        row = OrderedDict((column, "") for column in CSV_COLUMNS)
        row['space'] = record['space']
        for key in PARAMETER_KEYS:
            row[key] = _cell(record['parameters'].get(key))
        row['einstein_constant'] = _cell(record['einstein_constant'])
        for key in ('c', 'discriminant', 'f(c)'):
            row[key] = _cell(details.get(key))
        if verdict is not None:
            row['second_variation'] = _cell(verdict.second_variation)
            row['eigenvalue'] = _cell(verdict.eigenvalue)
            row['threshold'] = _cell(verdict.threshold)
            row['verdict'] = verdict.classification
            row['coindex_lower_bound'] = _cell(verdict.coindex_lower_bound)
        else:
            row['verdict'] = 'error'
        row['error'] = _cell(record['error'])
        rows.append(row)
    return pd.DataFrame(rows, columns=list(CSV_COLUMNS))


def format_number(value, digits: int = MARKDOWN_DIGITS):
    """Human-readable number: rationals exact, floats with the given number of significant digits"""
    if value is None:
        return ""
    if isinstance(value, sympy.Rational):
        return str(value.p) if value.q == 1 else "%d/%d" % (value.p, value.q)
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.*g" % (digits, float(value))
    if isinstance(value, (tuple, list)):
        return "(%s)" % ", ".join(format_number(item, digits) for item in value)
    return str(value)


def _parameters_text(parameters: OrderedDict):
    return ", ".join("%s=%s" % (key, format_number(value)) for key, value in parameters.items())


def _summary_rows(report: Report):
    """Header and rows of the human-readable result table"""
    header = ['space', 'parameters', 'metric', 'Einstein constant', 'witness', 'value', 'threshold', 'verdict',
              'coindex >=']
    rows = []
    for record in report.results:
        verdict = record['verdict']
        if verdict is None:
            witness, value, threshold, classification, coindex = "", "", "", "error: %s" % record['error'], ""
        elif verdict.second_variation is not None:
            witness = "second variation along %s" % format_number(verdict.direction)
            value, threshold = format_number(verdict.second_variation), "0"
            classification, coindex = verdict.classification, format_number(verdict.coindex_lower_bound)
        else:
            witness = "eigenvalue"
            value, threshold = format_number(verdict.eigenvalue), format_number(verdict.threshold)
            classification, coindex = verdict.classification, format_number(verdict.coindex_lower_bound)
        rows.append([record['space'], _parameters_text(record['parameters']), format_number(record['metric']),
                     format_number(record['einstein_constant']), witness, value, threshold, classification,
                     coindex])
    return header, rows


def _citations(report: Report):
    citations = []
    for index, record in enumerate(report.results):
        if record['citation']:
            citations.append("[%i] %s" % (index + 1, record['citation']))
    return citations


def _notes_by_dimension(report: Report):
    groups = OrderedDict()
    for note in report.notes:
        groups.setdefault(note['dimension'], []).append(note)
    return groups


def _markdown_table(header, rows):
    lines = ["| %s |" % " | ".join(header), "|%s" % ("---|" * len(header))]
    for row in rows:
        lines.append("| %s |" % " | ".join(str(cell).replace("|", "\\|") for cell in row))
    return "\n".join(lines)


def render_markdown(report: Report):
    """Markdown text with the configuration, the result table, citations, and the curated verdict tables"""
    verify_report(report)
    parts = ["# einstab report", "", "version: %s" % report.version, "", "## Configuration", ""]
    parts.append(_markdown_table(['key', 'value'],
                                 [[key, format_number(value)] for key, value in report.config.items()]))
    if report.results:
        header, rows = _summary_rows(report)
        parts.extend(["", "## Results", "", _markdown_table(header, rows)])
        citations = _citations(report)
        if citations:
            parts.extend(["", "## Citations", ""] + ["- %s" % text for text in citations])
    for dimension, notes in _notes_by_dimension(report).items():
        title = "## Dimension %i" % dimension if dimension is not None else "## Further results"
        parts.extend(["", title, "",
                      _markdown_table(['case', 'verdict', 'citation'],
                                      [[("%s %s" % (note['label'], note['case'])).strip(), note['verdict'],
                                        note['citation']] for note in notes])])
    return "\n".join(parts) + "\n"


def _rst_list_table(header, rows):
    lines = [".. list-table::", "   :header-rows: 1", ""]
    for row in [header] + rows:
        cells = [str(cell) if str(cell) else " " for cell in row]
        lines.append("   * - %s" % cells[0])
        lines.extend("     - %s" % cell for cell in cells[1:])
    return "\n".join(lines) + "\n\n"


def render_rst(report: Report, output: str, print_status: bool = True):
    """
    Write the report as an RST document

    :param report: The Report
    :param output: Path of the RST file
    :param print_status: Print status of creation (Default=True)
    :return: RSTDocument
    """
    verify_report(report)
    if print_status:
        PrintHelper.print("WRITING: %s" % output, PrintHelper.BOLD)
    document = RSTDocument()
    document.add_label("einstab-report")
    document.add_section("einstab report")
    document.add_text("Version %s\n\n" % report.version)
    document.add_subsection("Configuration")
    document.add_list(content=["%s: %s" % (key, format_number(value)) for key, value in report.config.items()])
    if report.results:
        document.add_subsection("Results")
        header, rows = _summary_rows(report)
        document.add_text(_rst_list_table(header, rows))
        citations = _citations(report)
        if citations:
            document.add_subsection("Citations")
            document.add_list(content=citations)
    for dimension, notes in _notes_by_dimension(report).items():
        document.add_subsection("Dimension %i" % dimension if dimension is not None else "Further results")
        document.add_text(_rst_list_table(['case', 'verdict', 'citation'],
                                          [[("%s %s" % (note['label'], note['case'])).strip(), note['verdict'],
                                            note['citation']] for note in notes]))
    document.write(output)
    return document


def render(report: Report, format: str, output: str = None, print_status: bool = False):
    """
    Render a report. Every verdict is re-derived from its witness first.

    :param report: The Report
    :param format: One of FORMATS
    :param output: Output file, required for rst
    :param print_status: Print status when writing rst
    :return: Text of the report (None for rst, which is written to output directly)
    :raises InvariantViolation: If a stored classification does not follow from its witness
    """
    if format == 'json':
        verify_report(report)
        return report.to_json()
    if format == 'csv':
        return report_table(report).to_csv(index=False)
    if format == 'markdown':
        return render_markdown(report)
    if format == 'rst':
        if output is None:
            raise ValueError("the rst format needs an output file")
        render_rst(report, output, print_status=print_status)
        return None
    raise ValueError("unknown format %s, expected one of %s" % (str(format), ", ".join(FORMATS)))


def write_text(text: str, output: str = None, print_status: bool = True):
    """Write text to the output file, or to stdout without status output"""
    if output is None:
        sys.stdout.write(text)
        return
    if print_status:
        PrintHelper.print("WRITING: %s" % output, PrintHelper.BOLD)
    with open(output, 'w') as f:
        f.write(text)


def _parse_range(text: str):
    try:
        low, high = (int(v) for v in text.split(':'))
    except ValueError:
        raise ValueError("--range must have the form MIN:MAX, got %s" % text)
    return low, high


def build_parser():
    """ArgumentParser with the analyze, sweep, and report subcommands"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="flat YAML file with configuration keys")
    common.add_argument('--format', choices=FORMATS)
    common.add_argument('--output', help="output file (default: stdout)")
    common.add_argument('--tol', type=float, help="tolerance for the Einstein residuals (default %g)" % EINSTEIN_TOL)
    common.add_argument('--threads', type=int, help="number of worker threads (default: $%s)" % THREADS_ENV)
    common.add_argument('--progress', action='store_true', default=None, help="progress bar on stderr")
    selectors = argparse.ArgumentParser(add_help=False)
    for name in ('p', 'q', 'n', 'm', 'k'):
        selectors.add_argument('--%s' % name, type=int)
    selectors.add_argument('--branch', choices=BRANCHES)
    selectors.add_argument('--case', choices=CASE_IDS)

    parser = argparse.ArgumentParser(prog='einstab', description="Instability of homogeneous Einstein metrics")
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    subparsers = parser.add_subparsers(dest='command', required=True)
    analyze = subparsers.add_parser('analyze', parents=[common, selectors], help="analyze one space")
    analyze.add_argument('space', choices=ANALYZE_SPACES)
    sweep_parser = subparsers.add_parser('sweep', parents=[common, selectors], help="sweep a parameter range")
    sweep_parser.add_argument('space', choices=SWEEP_SPACES)
    sweep_parser.add_argument('--range', dest='range', help="MIN:MAX of the swept parameter (q, n, m, p, or k)")
    report = subparsers.add_parser('report', parents=[common], help="default report or re-render a json report")
    report.add_argument('--input', help="json report to re-render")
    return parser


def config_from_args(args: argparse.Namespace):
    """
    Merge the configuration file with the command-line flags, flags taking precedence

    :return: AnalysisConfig
    """
    settings = load_config(args.config) if getattr(args, 'config', None) else {}
    for key in CONFIG_KEYS + ('input',):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if getattr(args, 'range', None):
        low, high = SWEEP_RANGE_KEYS[args.space]
        settings[low], settings[high] = _parse_range(args.range)
    return AnalysisConfig.create(args.command, **settings)


def main(argv=None):
    """
    Entry point of the einstab console script

    :return: Exit status 0, EXIT_USAGE, EXIT_SOLVER, or EXIT_INVARIANT
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if config.input is not None:
            with open(config.input, 'r') as f:
                report = Report.from_json(f.read())
        else:
            progress = None
            if config.progress:
                from tqdm import tqdm
                progress = functools.partial(tqdm, file=sys.stderr)
            report = run(config, tqdm=progress)
        text = render(report, config.format, output=config.output, print_status=config.output is not None)
        if text is not None:
            write_text(text, config.output, print_status=config.output is not None)
        return exit_status(report)
    except ValueError as e:
        sys.stderr.write("einstab: error: %s\n" % str(e))
        return EXIT_USAGE
    except SolverError as e:
        sys.stderr.write("einstab: solver failure: %s\n" % str(e))
        return EXIT_SOLVER
    except InvariantViolation as e:
        sys.stderr.write("einstab: invariant violation: %s\n" % str(e))
        return EXIT_INVARIANT


if __name__ == '__main__':
    sys.exit(main())
