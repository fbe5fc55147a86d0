#!/usr/bin/env python3
"""
Script to manually initialize the run-log database and create tables.

Usage:
    BTL_DATABASE_URL=sqlite:///btl_runs.db python scripts/init_db.py
"""
import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from sqlalchemy import inspect

from btl import database
from btl.config import BTL_DATABASE_URL


def main():
    if not BTL_DATABASE_URL:
        print("✗ BTL_DATABASE_URL is not set")
        sys.exit(1)

    print("Initializing run-log database...")
    print(f"BTL_DATABASE_URL: {BTL_DATABASE_URL[:50]}...")

    try:
        database.init_db()
        print("✓ Database connection successful")

        tables = inspect(database.engine).get_table_names()
        print(f"✓ Tables in database: {tables}")

        if "RunLogs" in tables:
            columns = inspect(database.engine).get_columns("RunLogs")
            print(f"✓ RunLogs table exists, columns: {[col['name'] for col in columns]}")
        else:
            print("✗ RunLogs table NOT found - something went wrong")
            sys.exit(1)

    except Exception as e:
        print(f"✗ Error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
