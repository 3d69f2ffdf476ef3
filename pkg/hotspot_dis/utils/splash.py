#!/usr/bin/env python

# splash.py - :)


def splash():
    """
       Display splash screen
       Logo generated with the figlet Standard font
    """
    logo = r"""
     _   _  ___ _____ ____  ____   ___ _____     ____ ___ ____
    | | | |/ _ \_   _/ ___||  _ \ / _ \_   _|   |  _ \_ _/ ___|
    | |_| | | | || | \___ \| |_) | | | || |_____| | | | |\___ \
    |  _  | |_| || |  ___) |  __/| |_| || |_____| |_| | | ___) |
    |_| |_|\___/ |_| |____/|_|    \___/ |_|     |____/___|____/
    """
    print('\n-----------------------------------------------------------------\n')
    print(logo)
    print('\n-----------------------------------------------------------------\n')
