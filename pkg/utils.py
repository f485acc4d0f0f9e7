'''
    ---------------------------------------------------------------------------
    oscidecay: utils.py
    ---------------------------------------------------------------------------

    Copyright 2024 The oscidecay Authors

    Licensed under the Apache License, Version 2.0 (the "License"); you may not
    use this file except in compliance with the License. You may obtain a copy
    of the License at http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.

    This script contains problem-file loading and validation, run manifests
    and their digests, and the CSV / JSON / YAML writers shared by the
    command-line driver.
'''

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
import pandas as pd
import yaml

from utilsFunctions import CutoffFunction, TestFunction
from utilsLinearAlgebra import fraction_to_string
from utilsPolynomials import Polynomial, Subspace, SubspaceFamily

VERSION = '0.1.0'

SECTIONS = ('dimension', 'polynomial', 'subspaces', 'cutoff', 'functions',
            'region')

# Problem sections read by each subcommand; others are ignored with a warning.
USED_SECTIONS = {
    'analyze': {'dimension', 'polynomial', 'subspaces'},
    'witness': {'dimension', 'polynomial', 'subspaces'},
    'decay': {'dimension', 'polynomial', 'subspaces', 'cutoff', 'functions'},
    'sublevel': {'dimension', 'polynomial', 'subspaces', 'functions',
                 'region'},
    'uniformity': {'functions'},
    'bht': set(),
}


# %% Problem files.
def import_metadata(filePath):
    if not os.path.exists(filePath):
        raise FileNotFoundError('No problem file at {}.'.format(filePath))
    with open(filePath, 'r', encoding='utf-8') as myYamlFile:
        parsedYamlFile = yaml.safe_load(myYamlFile)

    return parsedYamlFile


def file_digest(filePath):
    with open(filePath, 'rb') as f:
        return hashlib.sha256(f.read()).hexdigest()


def _parse_subspace(data, dimension):
    if isinstance(data, dict):
        V = Subspace.from_json(data)
    elif isinstance(data, (list, tuple)):
        V = Subspace(data)
    else:
        raise ValueError('Cannot parse subspace {!r}.'.format(data))
    if V.ambient != dimension:
        raise ValueError('Subspace basis vectors have length {} in a problem '
                         'of dimension {}.'.format(V.ambient, dimension))
    return V


def _parse_polynomial(data, dimension):
    if isinstance(data, str):
        return Polynomial.from_string(data, dimension)
    if isinstance(data, dict):
        P = Polynomial.from_json(data)
        if P.dimension != dimension:
            raise ValueError('Polynomial of dimension {} in a problem of '
                             'dimension {}.'.format(P.dimension, dimension))
        return P
    raise ValueError('Cannot parse polynomial {!r}.'.format(data))


@dataclass
class ProblemFile:
    """Validated problem: P, the family and the optional sections.

    functions is None (not given), the string 'adversarial', or a list of
    per-subspace TestFunction descriptions (dicts).
    """
    dimension: int
    polynomial: Polynomial
    family: SubspaceFamily
    cutoff: Optional[CutoffFunction] = None
    functions: object = None
    region: Optional[np.ndarray] = None
    sections: tuple = ()
    digest: Optional[str] = None

    @classmethod
    def from_dict(cls, data, digest=None):
        if not isinstance(data, dict):
            raise ValueError('A problem file must hold a mapping.')
        unknown = set(data) - set(SECTIONS)
        if unknown:
            raise ValueError('Unknown problem sections: {}.'.format(
                sorted(unknown)))
        for key in ('dimension', 'polynomial', 'subspaces'):
            if key not in data:
                raise ValueError('Problem file needs "{}".'.format(key))
        dimension = data['dimension']
        if isinstance(dimension, bool) or not isinstance(dimension, int) or \
                dimension < 1:
            raise ValueError('dimension must be a positive integer.')
        P = _parse_polynomial(data['polynomial'], dimension)
        family = SubspaceFamily(
            [_parse_subspace(s, dimension) for s in data['subspaces']],
            ambient=dimension)
        cutoff = None
        if data.get('cutoff') is not None:
            cutoff = CutoffFunction.from_json(data['cutoff'], dimension)
            if cutoff.dimension != dimension:
                raise ValueError('Cutoff center has length {} in a problem '
                                 'of dimension {}.'.format(cutoff.dimension,
                                                           dimension))
        functions = data.get('functions')
        if functions is not None and functions != 'adversarial':
            if not isinstance(functions, list) or \
                    len(functions) != len(family):
                raise ValueError('functions must be "adversarial" or a list '
                                 'with one entry per subspace.')
        region = None
        if data.get('region') is not None:
            region = np.asarray(data['region'], dtype=float)
            if region.shape != (dimension, 2) or \
                    np.any(region[:, 1] <= region[:, 0]):
                raise ValueError('region must list {} intervals [lo, hi] '
                                 'with lo < hi.'.format(dimension))
        return cls(dimension=dimension, polynomial=P, family=family,
                   cutoff=cutoff, functions=functions, region=region,
                   sections=tuple(k for k in SECTIONS if k in data),
                   digest=digest)

    @classmethod
    def load(cls, filePath):
        data = import_metadata(filePath)
        return cls.from_dict(data, digest=file_digest(filePath))

    def test_functions(self):
        """TestFunctions built from the listed descriptions."""
        if not isinstance(self.functions, list):
            return None
        return [TestFunction.from_json(spec, V.dimension)
                for spec, V in zip(self.functions, self.family)]

    def warn_unused(self, task):
        unused = [s for s in self.sections if s not in USED_SECTIONS[task]]
        for s in unused:
            logging.warning('Problem section "{}" is not used by {}.'.format(
                s, task))
        return unused


# %% Manifests.
def _plain(value):
    """JSON/YAML-safe copy of nested settings."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return _json_default(value) if not isinstance(
        value, (str, int, float, bool, type(None))) else value


def _json_default(value):
    if isinstance(value, Fraction):
        return fraction_to_string(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, Polynomial):
        return value.to_json()
    raise TypeError('Cannot serialise {!r}.'.format(value))


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    seed: int
    input_digest: Optional[str] = None
    version: str = VERSION
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {'subcommand': self.subcommand,
                'parameters': _plain(self.parameters),
                'seed': int(self.seed),
                'input_digest': self.input_digest,
                'version': self.version}

    @property
    def digest(self):
        text = json.dumps(self.to_dict(), sort_keys=True,
                          separators=(',', ':'))
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

    def dump(self):
        data = self.to_dict()
        data['manifest_digest'] = self.digest
        return yaml.dump(data, default_flow_style=False, sort_keys=True)

    def write(self, outputDir):
        os.makedirs(outputDir, exist_ok=True)
        path = os.path.join(outputDir, 'manifest.yaml')
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(self.dump())
        return path


# %% Writers.
def write_csv(frame, filePath, digest):
    with open(filePath, 'w', encoding='utf-8', newline='\n') as f:
        f.write('# manifest_digest: {}\n'.format(digest))
        frame.to_csv(f, index=False, lineterminator='\n')
    return filePath


def read_csv(filePath):
    return pd.read_csv(filePath, comment='#')


def write_json(data, filePath, digest):
    data = dict(data)
    data['manifest_digest'] = digest
    with open(filePath, 'w', encoding='utf-8', newline='\n') as f:
        f.write(json.dumps(data, indent=2, sort_keys=True,
                           default=_json_default))
        f.write('\n')
    return filePath


def read_json(filePath):
    with open(filePath, 'r', encoding='utf-8') as f:
        return json.load(f)
