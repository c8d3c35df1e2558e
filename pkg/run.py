#!/usr/bin/env python3
"""
Startup script for the association pipeline command line.

Usage: python run.py {generate,label,train,eval,oracle} [options]
"""
import sys
from pathlib import Path

# Add project root to Python path (so src.* imports work)
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.cli import main

if __name__ == "__main__":
    main()
