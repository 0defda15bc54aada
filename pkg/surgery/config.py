"""
Configuration for the surgery toolkit
Paths, conventions and message templates
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent

# ═══════════════════════════════════════════════════════════════════════════════
# PATHS (from environment variables)
# ═══════════════════════════════════════════════════════════════════════════════

PRESETS_DIR = Path(os.getenv('SURGERY_PRESETS_DIR', str(BASE_DIR / 'presets')))
DERIVATIONS_DIR = Path(os.getenv('SURGERY_DERIVATIONS_DIR', str(BASE_DIR / 'derivations')))
GOLDEN_DIR = Path(os.getenv('SURGERY_GOLDEN_DIR', str(BASE_DIR / 'golden')))

# ═══════════════════════════════════════════════════════════════════════════════
# CONVENTIONS
# ═══════════════════════════════════════════════════════════════════════════════

# +1: positive twist acts as x -> x + <x, c> c; -1 flips the sign
TWIST_SIGN = -1 if os.getenv('SURGERY_TWIST_SIGN', '1').strip() == '-1' else 1

REPORT_FORMAT = os.getenv('SURGERY_REPORT_FORMAT', 'text')
REPORT_FORMATS = ('text', 'kv', 'json', 'xlsx', 'pdf')

LOG_LEVEL = os.getenv('SURGERY_LOG_LEVEL', 'WARNING').upper()

# Largest denominator used by the grid sampler that cross-checks positivity
GRID_DENOMINATOR = int(os.getenv('SURGERY_GRID_DENOMINATOR', '8'))

# ═══════════════════════════════════════════════════════════════════════════════
# EXIT CODES
# ═══════════════════════════════════════════════════════════════════════════════

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

# ═══════════════════════════════════════════════════════════════════════════════
# CASE PRESETS
# ═══════════════════════════════════════════════════════════════════════════════

CASES = {
    'viii_case1': 'viii_case1.plan',
    'viii_case2': 'viii_case2.plan',
    'v_vstar': 'v_vstar.plan',
    'ix2_five': 'ix2_five.plan',
    'ix_mixed': 'ix_mixed.plan',
    'k3_two_c8': 'k3_two_c8.plan',
    'k3_pencil': 'k3_pencil.plan',
}

VERDICT_EXOTIC = 'exotic relative to cited rules'
VERDICT_INCONCLUSIVE = 'inconclusive'

# ═══════════════════════════════════════════════════════════════════════════════
# MESSAGE TEMPLATES
# ═══════════════════════════════════════════════════════════════════════════════

MESSAGES = {
    'plan_ok': "Plan {name} executed: {entries} report entries",
    'plan_failed': "Plan {name} failed: {error}",
    'case_unknown': "Unknown case '{name}'. Available: {available}",
    'derivation_ok': "Derivation {name} replays to its end word ({moves} moves)",
    'derivation_failed': "Derivation {name} failed at step {step}: {error}",
    'block_line': "  block {index}: {word}  ->  {kind}",
    'report_written': "Report written to {path}",
    'chain_weights': "weights: {weights}",
    'chain_boundary': "boundary: {boundary}",
    'chain_fraction': "continued fraction: {value}",
    'chain_determinant': "det: {det}",
    'chain_inverse': "inverse column 1: {column}",
    'matrix_identity': "word acts as {result} on H1",
}

# ═══════════════════════════════════════════════════════════════════════════════
# STATUS EMOJIS
# ═══════════════════════════════════════════════════════════════════════════════

EMOJIS = {
    'ok': '✅',
    'fail': '❌',
    'warn': '⚠️',
    'run': '🚀',
    'report': '📊',
    'export': '📥',
}
